#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gesr {

// Model outputs may contain NaN/inf entries marking rows where evaluation
// failed with a math error; any such entry makes the whole-set error +inf.

// Misclassification fraction under the sign rule: output < 0 predicts the
// first class (target 0), otherwise the second class (target 1).
double classification_error(std::span<const double> outputs, std::span<const double> targets);

// Root-mean-square error.
double regression_error(std::span<const double> outputs, std::span<const double> targets);

enum class TestTail {
    a_less_than_b,     // alternative: values in a tend to be smaller
    a_greater_than_b,  // alternative: values in a tend to be larger
};

struct TestResult {
    double u_statistic = 0.0;  // U of sample a (midrank ties)
    double p_value = 1.0;
    TestTail alternative = TestTail::a_less_than_b;
};

// One-sided Mann-Whitney U test. Exact p by enumerating all assignments of
// the pooled ranks when |a| + |b| <= 12; otherwise normal approximation with
// tie-corrected variance and continuity correction.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          TestTail alternative = TestTail::a_less_than_b);

struct Summary {
    int count = 0;           // all values, including non-finite ones
    int infinite_count = 0;  // excluded from every statistic below
    double median = 0.0;     // midpoint-of-two rule
    double mean = 0.0;
    double stddev = 0.0;     // sample stddev (n - 1); 0 when n < 2
    double q1 = 0.0;         // linear-interpolation quartiles
    double q3 = 0.0;
    double whisker_low = 0.0;   // extreme data points within 1.5*IQR of the box
    double whisker_high = 0.0;
    std::vector<double> outliers;  // finite points beyond the whiskers
};

// Box-plot statistics. When every value is non-finite the location fields are
// all +inf and outliers is empty.
Summary summarize(std::span<const double> values);

struct RankEntry {
    std::string method;
    int rank = 0;       // 1-based; shared within a group
    double median = 0.0;  // over the full sample, infinities included
};

struct RankTable {
    double alpha = 0.05;
    std::vector<RankEntry> entries;  // sorted by median ascending
};

// Ranks methods by sample median (ascending = better), then merges adjacent
// methods into one rank group when the one-sided test (better-median sample
// smaller than worse-median sample) is not significant at alpha. Requires
// >= 2 methods with equal sample sizes.
RankTable rank_methods(const std::vector<std::pair<std::string, std::vector<double>>>& samples,
                       double alpha = 0.05);

} // namespace gesr
