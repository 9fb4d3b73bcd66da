#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gesr/engine.hpp"
#include "gesr/stats.hpp"

namespace gesr {

inline constexpr const char* kArtifactVersion = "1.0";

struct ExperimentConfig {
    std::vector<std::string> datasets;
    std::vector<std::string> methods;  // strategy names, stored canonically
    int runs_per_method = 96;
    double trn_fraction = 0.7;
    double ab_fraction = 0.5;
    EngineConfig engine;
    std::uint64_t base_seed = 1;
    std::string output_dir = "results";
    std::string data_dir = "data";
    std::string grammar_file;  // empty = built-in expression grammar
    int parallel_jobs = 1;

    void validate() const;  // throws std::invalid_argument
};

// JSON document mirroring the struct; missing keys take the defaults above,
// unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

// Fingerprint of the result-determining fields only: datasets, methods, run
// count, fractions, base seed, engine parameters (minus eval_threads, which
// cannot change results) and the grammar text. Output paths and job
// parallelism are excluded so resuming with different operational settings
// still matches.
std::string config_hash(const ExperimentConfig& cfg);

nlohmann::json run_record_to_json(const RunRecord& record, const std::string& cfg_hash);
RunRecord run_record_from_json(const nlohmann::json& j);

struct RunKey {
    std::string dataset;
    std::string method;
    int run_index = 0;

    auto operator<=>(const RunKey&) const = default;
    std::string filename() const;  // "<dataset>__<method>__run<NNNN>.json"
};

struct IncompleteGridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One JSON file per run plus manifest.json and index.csv, all under one
// directory. Writes go through a temp file + rename so records are never
// observed half-written.
class ResultStore {
public:
    explicit ResultStore(std::string directory);

    const std::string& directory() const { return dir_; }

    // Creates the directory and manifest.json if absent; an existing manifest
    // must carry the same config hash or this throws.
    void init(const ExperimentConfig& cfg);
    // Loads an existing manifest; throws when the directory has none.
    void open();

    const ExperimentConfig& manifest_config() const;
    const std::string& manifest_hash() const;

    bool has(const RunKey& key) const;
    void put(const RunRecord& record);
    RunRecord get(const RunKey& key) const;
    std::vector<RunKey> keys() const;  // sorted directory scan

    void write_index_csv() const;

private:
    std::string dir_;
    bool loaded_ = false;
    ExperimentConfig config_;
    std::string hash_;
};

// Executes the full (dataset x method x run) grid, skipping keys that already
// have records (idempotent resume). Splits are seeded per (dataset,
// run_index) only, so every method sees identical train/test rows and — for
// the validation-split family — identical pool/selection halves; evolution
// seeds also mix in the method name. Progress goes to stderr.
ResultStore run_experiment(const ExperimentConfig& cfg);

struct AnalysisRow {
    int rank = 0;
    std::string method;
    Summary tst;        // final test errors across runs
    Summary trn;        // final training errors
    Summary tree_size;  // final model sizes
};

struct DatasetAnalysis {
    std::string dataset;
    std::vector<AnalysisRow> rows;  // ordered by rank, then median
};

struct Analysis {
    double alpha = 0.05;
    std::vector<DatasetAnalysis> datasets;
};

// Ranks methods per dataset by final test error and summarizes the reported
// statistics. Throws IncompleteGridError when the manifest grid has missing
// records (the message lists them).
Analysis analyze(const ResultStore& store);

// Writes analysis_<dataset>.csv (rank, method, and median/mean/stddev for
// test error, training error and tree size), boxplot_<dataset>.json, and a
// combined analysis.json into out_dir.
void write_analysis(const Analysis& analysis, const std::string& out_dir);

// Box-plot records (quartiles, whiskers, outliers of final test error) for
// every method with stored runs on the dataset. Throws std::invalid_argument
// when the store has no records for it.
nlohmann::json export_boxplot_data(const ResultStore& store, const std::string& dataset);

} // namespace gesr
