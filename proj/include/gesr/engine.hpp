#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gesr/dataset.hpp"
#include "gesr/grammar.hpp"
#include "gesr/rng.hpp"
#include "gesr/strategy.hpp"
#include "gesr/util.hpp"

namespace gesr {

struct EngineConfig {
    int population_size = 500;
    int generations = 200;
    int tournament_size = 4;
    double crossover_prob = 0.5;
    double mutation_prob_per_codon = 0.1;
    double pruning_prob = 0.2;
    double duplication_prob = 0.2;
    int initial_max_genotype_length = 100;
    int codon_min = 0;
    int codon_max = 255;
    int max_wraps = 0;   // wrapping is unsupported; anything but 0 is rejected
    int eval_threads = 1;  // fitness evaluation workers; never changes results
    int tracker_top_k = 0; // 0 = every finite-fitness individual may enter the tracker

    void validate() const;  // throws std::invalid_argument
};

struct Individual {
    std::vector<int> genotype;
    MappingOutcome mapping;
    std::string phenotype;  // canonical text, empty when the mapping is invalid
    double fitness = kInf;

    int tree_size() const { return mapping.tree.size(); }
};

// Fresh individual: map the genotype and render the phenotype text.
Individual make_individual(const Grammar& grammar, std::vector<int> genotype);

// population_size individuals; genotype lengths uniform on
// [1, initial_max_genotype_length], codons uniform on the codon range.
std::vector<Individual> init_population(const EngineConfig& cfg, const Grammar& grammar,
                                        Rng& rng);

// k uniform draws with replacement; minimal fitness wins, ties broken by
// smaller tree size, then by earlier population index. Returns the index.
int tournament_select(const std::vector<Individual>& population, int k, Rng& rng);

// Pure one-point tail swap: children are head(p1, c1)+tail(p2, c2) and
// head(p2, c2)+tail(p1, c1); cut points in [0, len] (0 and len permitted).
std::pair<std::vector<int>, std::vector<int>> crossover_at(std::span<const int> p1,
                                                           std::span<const int> p2, int c1,
                                                           int c2);

// With probability prob picks uniform cut points and swaps tails; an empty
// child is replaced by a single random codon. Otherwise returns copies.
std::pair<std::vector<int>, std::vector<int>> ripple_crossover(std::span<const int> p1,
                                                               std::span<const int> p2,
                                                               double prob,
                                                               const EngineConfig& cfg,
                                                               Rng& rng);

// Each codon independently rewritten with the given probability; length kept.
std::vector<int> mutate(std::span<const int> g, double per_codon_prob, const EngineConfig& cfg,
                        Rng& rng);

// Pure segment append: copies g[start .. start+len) onto the end.
std::vector<int> duplicate_at(std::span<const int> g, int start, int len);

// With probability prob appends a copy of a random contiguous segment
// (uniform start, uniform length >= 1 fitting the genotype).
std::vector<int> duplicate(std::span<const int> g, double prob, Rng& rng);

// With probability prob, and only when the mapping is valid, drops codons
// beyond the consumed prefix; the phenotype is untouched. Always consumes
// exactly one RNG draw so downstream draws do not depend on validity.
void prune(Individual& ind, double prob, Rng& rng);

struct GenerationLog {
    double best_fitness = kInf;       // minimal fitness in the population
    double selection_error = kInf;    // tracker's recorded set-B error / vs fitness
    double trn_error = kInf;          // tracker's model error on the full training set
    int tree_size = 0;                // tracker's model size

    bool operator==(const GenerationLog&) const = default;
};

struct RunRecord {
    std::string dataset;
    std::string method;
    int run_index = 0;
    std::uint64_t base_seed = 0;
    std::uint64_t run_seed = 0;

    int trn_size = 0;
    int tst_size = 0;
    std::string trn_hash;   // fingerprints of the index sets actually used,
    std::string tst_hash;   // for cross-method pairing checks
    std::string pool_hash;
    std::string trn_b_hash;

    bool has_vs_weight = false;
    double vs_weight_w1 = 0.0;

    std::vector<GenerationLog> log;  // exactly `generations` entries

    std::string final_model;         // empty if no finite model ever appeared
    int final_tree_size = 0;
    int best_generation = -1;        // generation the final model was recorded (0 = initial)
    double final_selection_error = kInf;
    double final_trn_error = kInf;
    double final_tst_error = kInf;

    bool operator==(const RunRecord&) const = default;
};

struct RunData {
    const Dataset* dataset = nullptr;
    std::vector<int> trn;  // dataset row ids
    std::vector<int> tst;
    DataSplit split;       // built by make_split for the strategy in use
};

struct RunLabels {
    std::string dataset;
    std::string method;
    int run_index = 0;
    std::uint64_t base_seed = 0;
    std::uint64_t run_seed = 0;
};

// One full evolutionary run. Per generation: breed (tournament selection,
// crossover, mutation, duplication, mapping, pruning, elitism of 1),
// evaluate fitness on the strategy's per-generation rows, update the
// best-so-far tracker from every finite-fitness individual (strict
// improvement), log. The initial population is evaluated and tracked before
// the first logged generation. RNG draws happen only in breed_rng (breeding)
// and strat_rng (per-generation sets, vs weight), never during evaluation, so
// eval_threads cannot change the outcome.
RunRecord run_evolution(const EngineConfig& cfg, const Grammar& grammar, StrategySpec spec,
                        const RunData& data, const RunLabels& labels, Rng& breed_rng,
                        Rng& strat_rng);

// Columns: generation, best_fitness, tracker_trnb_error, trn_error, tree_size.
void write_generation_log_csv(const RunRecord& record, const std::string& path);

// Hex fingerprint of an index sequence (order-sensitive).
std::string hash_indices(std::span<const int> indices);

} // namespace gesr
