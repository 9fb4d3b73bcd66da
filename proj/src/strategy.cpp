#include "gesr/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "gesr/util.hpp"

namespace gesr {

namespace {

double parse_percentage(std::string_view name, std::string_view suffix) {
    std::string buf(suffix);
    char* end = nullptr;
    double p = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || p < 0.0 || p > 100.0)
        throw std::invalid_argument("strategy '" + std::string(name) +
                                    "': percentage must be a number in [0, 100]");
    return p / 100.0;
}

std::string format_percentage(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", fraction * 100.0);
    return buf;
}

} // namespace

StrategySpec StrategySpec::parse(std::string_view name) {
    std::string n = to_lower(trim(name));
    StrategySpec spec;
    if (n == "std") {
        spec.kind = StrategyKind::std_full;
    } else if (n == "bw") {
        spec.kind = StrategyKind::bw;
    } else if (n == "vs") {
        spec.kind = StrategyKind::vs;
    } else if (n == "rst-1-1") {
        spec.kind = StrategyKind::rst11;
    } else if (n == "rst-r") {
        spec.kind = StrategyKind::rstr;
    } else if (n == "vrst-1-1") {
        spec.kind = StrategyKind::vrst11;
    } else if (n == "vrst-r") {
        spec.kind = StrategyKind::vrstr;
    } else if (n == "ri" || n.rfind("ri-", 0) == 0) {
        spec.kind = StrategyKind::ri;
        if (n != "ri") spec.ri_percentage = parse_percentage(name, std::string_view(n).substr(3));
    } else if (n == "vri" || n.rfind("vri-", 0) == 0) {
        spec.kind = StrategyKind::vri;
        if (n != "vri") spec.ri_percentage = parse_percentage(name, std::string_view(n).substr(4));
    } else {
        throw std::invalid_argument(
            "unknown strategy '" + std::string(name) +
            "' (expected std, bw, vs, rst-1-1, ri-<P>, rst-r, vrst-1-1, vri-<P> or vrst-r)");
    }
    return spec;
}

std::string StrategySpec::to_string() const {
    switch (kind) {
    case StrategyKind::std_full: return "std";
    case StrategyKind::bw: return "bw";
    case StrategyKind::vs: return "vs";
    case StrategyKind::rst11: return "rst-1-1";
    case StrategyKind::ri: return "ri-" + format_percentage(ri_percentage);
    case StrategyKind::rstr: return "rst-r";
    case StrategyKind::vrst11: return "vrst-1-1";
    case StrategyKind::vri: return "vri-" + format_percentage(ri_percentage);
    case StrategyKind::vrstr: return "vrst-r";
    }
    return "?";
}

bool StrategySpec::uses_validation_split() const {
    switch (kind) {
    case StrategyKind::bw:
    case StrategyKind::vs:
    case StrategyKind::vrst11:
    case StrategyKind::vri:
    case StrategyKind::vrstr: return true;
    default: return false;
    }
}

DataSplit make_split(std::span<const int> trn, const StrategySpec& spec, double ab_ratio,
                     Rng& rng) {
    if (trn.empty()) throw std::invalid_argument("make_split: empty training set");
    DataSplit split;
    split.trn_indices.assign(trn.begin(), trn.end());
    if (!spec.uses_validation_split()) {
        split.trn_a_pool = split.trn_indices;
        split.trn_b = split.trn_indices;
        return split;
    }
    if (ab_ratio <= 0.0 || ab_ratio >= 1.0)
        throw std::invalid_argument("make_split: ab_ratio must be in (0, 1)");
    int n = static_cast<int>(trn.size());
    int n_pool = static_cast<int>(std::llround(ab_ratio * n));
    if (n_pool < 1 || n_pool >= n)
        throw std::invalid_argument("make_split: " + std::to_string(n) +
                                    " training rows cannot be split at ratio " +
                                    std::to_string(ab_ratio));
    std::vector<int> order(trn.begin(), trn.end());
    for (int i = n - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(uniform_int(rng, 0, i))]);
    split.trn_a_pool.assign(order.begin(), order.begin() + n_pool);
    split.trn_b.assign(order.begin() + n_pool, order.end());
    std::sort(split.trn_a_pool.begin(), split.trn_a_pool.end());
    std::sort(split.trn_b.begin(), split.trn_b.end());
    return split;
}

GenerationSets generation_sets(const StrategySpec& spec, const DataSplit& split,
                               [[maybe_unused]] int generation, Rng& rng) {
    const std::vector<int>& pool = split.trn_a_pool;
    if (pool.empty() || split.trn_b.empty())
        throw std::logic_error("generation_sets: empty pool or selection set");
    GenerationSets sets;
    sets.trn_b = std::span<const int>(split.trn_b);

    auto full_pool = [&] {
        sets.trn_a = pool;
        sets.trn_a_is_full_pool = true;
    };
    auto one_row = [&] {
        sets.trn_a = {pool[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(pool.size()) - 1))]};
    };

    switch (spec.kind) {
    case StrategyKind::std_full:
    case StrategyKind::bw:
    case StrategyKind::vs: full_pool(); break;
    case StrategyKind::rst11:
    case StrategyKind::vrst11: one_row(); break;
    case StrategyKind::ri:
    case StrategyKind::vri:
        if (chance(rng, spec.ri_percentage))
            one_row();
        else
            full_pool();
        break;
    case StrategyKind::rstr:
    case StrategyKind::vrstr: {
        int size = uniform_int(rng, 1, static_cast<int>(pool.size()));
        sets.trn_a.reserve(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i)
            sets.trn_a.push_back(pool[static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<int>(pool.size()) - 1))]);
        break;
    }
    }
    return sets;
}

double compute_fitness(const StrategySpec& spec, double err_a, double err_b) {
    if (spec.kind != StrategyKind::vs) return err_a;
    double w1 = spec.vs_weight_w1;
    return w1 * err_a + (1.0 - w1) * std::fabs(err_a - err_b);
}

double selection_error(const StrategySpec& spec, double fitness, double err_b) {
    return spec.kind == StrategyKind::vs ? fitness : err_b;
}

} // namespace gesr
