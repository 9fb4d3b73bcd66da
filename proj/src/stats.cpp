#include "gesr/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "gesr/util.hpp"

namespace gesr {

double classification_error(std::span<const double> outputs, std::span<const double> targets) {
    if (outputs.size() != targets.size())
        throw std::invalid_argument("classification_error: length mismatch");
    if (outputs.empty()) throw std::invalid_argument("classification_error: empty input");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (!std::isfinite(outputs[i])) return kInf;
        int predicted = outputs[i] < 0.0 ? 0 : 1;
        int actual = targets[i] != 0.0 ? 1 : 0;
        if (predicted != actual) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(outputs.size());
}

double regression_error(std::span<const double> outputs, std::span<const double> targets) {
    if (outputs.size() != targets.size())
        throw std::invalid_argument("regression_error: length mismatch");
    if (outputs.empty()) throw std::invalid_argument("regression_error: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (!std::isfinite(outputs[i])) return kInf;
        double r = outputs[i] - targets[i];
        sum += r * r;
    }
    if (!std::isfinite(sum)) return kInf;
    return std::sqrt(sum / static_cast<double>(outputs.size()));
}

namespace {

// Midranks of the pooled sample; values must be ordered, ranks are 1-based.
std::vector<double> midranks(const std::vector<double>& sorted) {
    std::vector<double> ranks(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[k] = r;
        i = j + 1;
    }
    return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          TestTail alternative) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann_whitney_u: empty sample");
    std::size_t na = a.size(), nb = b.size(), n = na + nb;

    std::vector<double> pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = pooled[order[i]];
    std::vector<double> rank_by_pos = midranks(sorted);
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = rank_by_pos[i];

    double ra = 0.0;
    for (std::size_t i = 0; i < na; ++i) ra += rank[i];
    double u = ra - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;

    TestResult res;
    res.u_statistic = u;
    res.alternative = alternative;

    if (n <= 12) {
        // Exact permutation distribution of U over all C(n, na) assignments
        // of the observed (mid)ranks to sample a. The half-integer rank sums
        // are exactly representable, so comparisons below are exact.
        std::size_t favorable = 0, total = 0;
        double base = static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
            ++total;
            double rs = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) rs += rank_by_pos[i];
            double u_perm = rs - base;
            bool hit = alternative == TestTail::a_less_than_b ? u_perm <= u : u_perm >= u;
            if (hit) ++favorable;
        }
        res.p_value = static_cast<double>(favorable) / static_cast<double>(total);
        return res;
    }

    double mean = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
    double tie_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    double nn = static_cast<double>(n);
    double variance = (static_cast<double>(na) * static_cast<double>(nb) / 12.0) *
                      ((nn + 1.0) - tie_sum / (nn * (nn - 1.0)));
    if (variance <= 0.0) {
        res.p_value = 1.0;  // every observation tied: no evidence either way
        return res;
    }
    double sd = std::sqrt(variance);
    double p;
    if (alternative == TestTail::a_less_than_b)
        p = normal_cdf((u - mean + 0.5) / sd);
    else
        p = normal_cdf(-(u - mean - 0.5) / sd);
    res.p_value = std::clamp(p, 0.0, 1.0);
    return res;
}

namespace {

double median_sorted(const std::vector<double>& v) {
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Quantile by linear interpolation between order statistics: h = (n-1)*p.
double quantile_sorted(const std::vector<double>& v, double p) {
    if (v.size() == 1) return v[0];
    double h = static_cast<double>(v.size() - 1) * p;
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

} // namespace

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty input");
    Summary s;
    s.count = static_cast<int>(values.size());
    std::vector<double> finite;
    finite.reserve(values.size());
    for (double v : values) {
        if (std::isfinite(v))
            finite.push_back(v);
        else
            ++s.infinite_count;
    }
    if (finite.empty()) {
        s.median = s.mean = s.stddev = s.q1 = s.q3 = kInf;
        s.whisker_low = s.whisker_high = kInf;
        return s;
    }
    std::sort(finite.begin(), finite.end());
    std::size_t n = finite.size();

    s.median = median_sorted(finite);
    s.mean = std::accumulate(finite.begin(), finite.end(), 0.0) / static_cast<double>(n);
    if (n >= 2) {
        double ss = 0.0;
        for (double v : finite) {
            double d = v - s.mean;
            ss += d * d;
        }
        s.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    s.q1 = quantile_sorted(finite, 0.25);
    s.q3 = quantile_sorted(finite, 0.75);
    double iqr = s.q3 - s.q1;
    double lo_fence = s.q1 - 1.5 * iqr;
    double hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_low = s.q1;
    s.whisker_high = s.q3;
    for (double v : finite) {
        if (v >= lo_fence) {
            s.whisker_low = v;  // first (smallest) point inside the fence
            break;
        }
    }
    for (auto it = finite.rbegin(); it != finite.rend(); ++it) {
        if (*it <= hi_fence) {
            s.whisker_high = *it;
            break;
        }
    }
    for (double v : finite)
        if (v < lo_fence || v > hi_fence) s.outliers.push_back(v);
    return s;
}

namespace {

double median_with_infinities(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return median_sorted(v);
}

} // namespace

RankTable rank_methods(const std::vector<std::pair<std::string, std::vector<double>>>& samples,
                       double alpha) {
    if (samples.size() < 2)
        throw std::invalid_argument("rank_methods: need at least 2 methods");
    std::size_t runs = samples.front().second.size();
    if (runs == 0) throw std::invalid_argument("rank_methods: empty sample");
    for (const auto& [name, values] : samples)
        if (values.size() != runs)
            throw std::invalid_argument("rank_methods: unequal run counts (method " + name + ")");

    struct Row {
        std::size_t index;
        double median;
    };
    std::vector<Row> rows;
    rows.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        rows.push_back({i, median_with_infinities(samples[i].second)});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.median < b.median; });

    RankTable table;
    table.alpha = alpha;
    int rank = 1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) {
            const auto& better = samples[rows[i - 1].index].second;
            const auto& worse = samples[rows[i].index].second;
            TestResult t = mann_whitney_u(better, worse, TestTail::a_less_than_b);
            if (t.p_value < alpha) ++rank;  // significant gap starts a new group
        }
        table.entries.push_back({samples[rows[i].index].first, rank, rows[i].median});
    }
    return table;
}

} // namespace gesr
