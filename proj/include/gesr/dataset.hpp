#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gesr/rng.hpp"

namespace gesr {

enum class Task { classification, regression };

struct Dataset {
    std::string name;
    Task task = Task::regression;
    int n_features = 0;
    std::vector<double> values;  // row-major, n_rows x n_features
    std::vector<double> targets; // classification targets in {0, 1}
    std::vector<std::string> feature_names;

    int n_rows() const { return static_cast<int>(targets.size()); }
    std::span<const double> row(int i) const {
        return {values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_features),
                static_cast<std::size_t>(n_features)};
    }
    // Throws std::invalid_argument on non-finite features, size mismatches,
    // or non-binary classification targets.
    void validate() const;
};

// Regression: each feature independent uniform on x_range; target is the sum
// of squared features plus per-row uniform noise from noise_range.
Dataset gen_sphere(int n, int n_features, std::pair<double, double> x_range,
                   std::pair<double, double> noise_range, Rng& rng);

// Two interleaved spirals (radius grows linearly with angle over `turns`
// revolutions, second class rotated by pi), Gaussian positional noise.
Dataset gen_two_spirals(int n, double turns, double noise_sd, Rng& rng);

// Isotropic Gaussian blob (sd = inner_radius) inside a ring whose radius is
// uniform on [ring_radius - inner_radius, ring_radius + inner_radius].
Dataset gen_cluster_in_cluster(int n, double inner_radius, double ring_radius, Rng& rng);

// Two concentric half-circle arcs (x >= 0 half) of the given radii with
// Gaussian noise sd = 0.1 * |r2 - r1|.
Dataset gen_halfkernel(int n, std::pair<double, double> arc_radii, Rng& rng);

// UCI Forest Fires: 12 input columns + burned area target; month and day
// names encoded as 1..12 / 1..7. Errors name the offending line and column.
Dataset load_forest_fires(const std::string& path);

// UCI Breast Cancer Wisconsin (Diagnostic): ID dropped, diagnosis B -> 0,
// M -> 1, 30 numeric features.
Dataset load_wdbc(const std::string& path);

struct SplitSpec {
    double trn_fraction = 0.7;
    int run_index = 0;
    std::uint64_t base_seed = 0;
};

// Disjoint, exhaustive (train, test) index sets from a uniform shuffle seeded
// only by (base_seed, dataset name, run_index); |train| = round(fraction * n).
// Both sets are returned sorted ascending.
std::pair<std::vector<int>, std::vector<int>> split_trn_tst(const Dataset& ds,
                                                            const SplitSpec& spec);

// CSV layout `feature_1,...,feature_k,target` with full-precision reals.
void write_csv(const Dataset& ds, const std::string& path);
Dataset load_dataset_csv(const std::string& path, const std::string& name, Task task);

// Registry: ts, cic, hk, sph generated with their default parameters and a
// seed derived from base_seed; ff and wdbc loaded from data_dir.
std::vector<std::string> dataset_names();
bool is_synthetic_dataset(const std::string& name);
Dataset make_dataset(const std::string& name, std::uint64_t base_seed,
                     const std::string& data_dir);

} // namespace gesr
