#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gesr/rng.hpp"

namespace gesr {

// The nine training-data-handling strategies. Fitness is computed on the
// per-generation set A; the best-so-far model is selected by the error on the
// fixed set B (except vs, which selects by its composite fitness).
enum class StrategyKind {
    std_full,  // A = B = full training set
    bw,        // fitness on pool half, selection on held-out half
    vs,        // weighted fitness w1*err_a + (1-w1)*|err_a - err_b|
    rst11,     // A = a fresh single row each generation
    ri,        // A = single row with probability p, else the full set
    rstr,      // A = random-size sample with replacement
    vrst11,    // rst11 drawing from a held-out-complement pool
    vri,       // ri on the pool
    vrstr,     // rstr on the pool
};

struct StrategySpec {
    StrategyKind kind = StrategyKind::std_full;
    double ri_percentage = 0.6;  // ri/vri: probability of the single-row branch
    double vs_weight_w1 = 1.0;   // vs: fitness weight, drawn once per run

    // Names: std, bw, vs, rst-1-1, ri-<P>, rst-r, vrst-1-1, vri-<P>, vrst-r
    // (P = percentage, e.g. ri-60). Throws std::invalid_argument otherwise.
    static StrategySpec parse(std::string_view name);
    std::string to_string() const;

    // bw/vs/vrst-1-1/vri/vrst-r evaluate fitness on a pool disjoint from the
    // model-selection half.
    bool uses_validation_split() const;
    bool is_vs() const { return kind == StrategyKind::vs; }
};

struct DataSplit {
    std::vector<int> trn_indices;  // full training set (dataset row ids)
    std::vector<int> trn_a_pool;   // rows fitness sets are drawn from
    std::vector<int> trn_b;        // rows driving best-so-far selection
};

// Validation-family strategies: shuffles trn and takes round(ab_ratio*|trn|)
// rows as the pool, the rest as set B (both sorted); every other kind uses
// the whole training set for both. Throws when a side would be empty.
DataSplit make_split(std::span<const int> trn, const StrategySpec& spec, double ab_ratio,
                     Rng& rng);

struct GenerationSets {
    std::vector<int> trn_a;        // fitness rows; may repeat (sampling with replacement)
    std::span<const int> trn_b;    // fixed for the whole run, points into the split
    bool trn_a_is_full_pool = false;
};

// Per-generation fitness-set prescription. Draw order (for reproducibility):
// rst-1-1/vrst-1-1 one index draw; ri/vri one branch draw, then one index
// draw when the single-row branch hits; rst-r/vrst-r one size draw, then that
// many index draws; std/bw/vs none.
GenerationSets generation_sets(const StrategySpec& spec, const DataSplit& split,
                               int generation, Rng& rng);

// vs: w1*err_a + (1-w1)*|err_a - err_b|; every other kind: err_a.
double compute_fitness(const StrategySpec& spec, double err_a, double err_b);

// The value the best-so-far tracker compares: the composite fitness for vs,
// the set-B error for every other kind.
double selection_error(const StrategySpec& spec, double fitness, double err_b);

} // namespace gesr
