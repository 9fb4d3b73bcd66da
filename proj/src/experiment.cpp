#include "gesr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fs = std::filesystem;
using nlohmann::json;

namespace gesr {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    fs::rename(tmp, path);
}

json enc_real(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double dec_real(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::runtime_error(std::string("expected a real value for ") + what);
}

std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

} // namespace

void ExperimentConfig::validate() const {
    if (datasets.empty()) throw std::invalid_argument("config: datasets must be non-empty");
    auto known = dataset_names();
    for (const auto& d : datasets)
        if (std::find(known.begin(), known.end(), d) == known.end())
            throw std::invalid_argument("config: unknown dataset '" + d + "'");
    if (std::set<std::string>(datasets.begin(), datasets.end()).size() != datasets.size())
        throw std::invalid_argument("config: duplicate dataset");
    if (methods.empty()) throw std::invalid_argument("config: methods must be non-empty");
    std::set<std::string> canonical;
    for (const auto& m : methods)
        if (!canonical.insert(StrategySpec::parse(m).to_string()).second)
            throw std::invalid_argument("config: duplicate method '" + m + "'");
    if (runs_per_method < 1)
        throw std::invalid_argument("config: runs_per_method must be >= 1");
    if (trn_fraction <= 0.0 || trn_fraction >= 1.0)
        throw std::invalid_argument("config: trn_fraction must be in (0, 1)");
    if (ab_fraction <= 0.0 || ab_fraction >= 1.0)
        throw std::invalid_argument("config: ab_fraction must be in (0, 1)");
    if (parallel_jobs < 1) throw std::invalid_argument("config: parallel_jobs must be >= 1");
    if (output_dir.empty()) throw std::invalid_argument("config: output_dir must be set");
    engine.validate();
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::runtime_error("config: expected a JSON object");
    static const std::set<std::string> top_keys = {
        "datasets",   "methods",  "runs_per_method", "trn_fraction", "ab_fraction",
        "engine",     "base_seed", "output_dir",     "data_dir",     "grammar_file",
        "parallel_jobs"};
    static const std::set<std::string> engine_keys = {
        "population_size",  "generations",    "tournament_size",
        "crossover_prob",   "mutation_prob_per_codon", "pruning_prob",
        "duplication_prob", "initial_max_genotype_length", "codon_min",
        "codon_max",        "max_wraps",      "eval_threads",
        "tracker_top_k"};
    for (const auto& item : j.items())
        if (!top_keys.count(item.key()))
            throw std::runtime_error("config: unknown key '" + item.key() + "'");

    ExperimentConfig cfg;
    read_key(j, "datasets", cfg.datasets);
    read_key(j, "methods", cfg.methods);
    read_key(j, "runs_per_method", cfg.runs_per_method);
    read_key(j, "trn_fraction", cfg.trn_fraction);
    read_key(j, "ab_fraction", cfg.ab_fraction);
    read_key(j, "base_seed", cfg.base_seed);
    read_key(j, "output_dir", cfg.output_dir);
    read_key(j, "data_dir", cfg.data_dir);
    read_key(j, "grammar_file", cfg.grammar_file);
    read_key(j, "parallel_jobs", cfg.parallel_jobs);
    if (auto it = j.find("engine"); it != j.end()) {
        for (const auto& item : it->items())
            if (!engine_keys.count(item.key()))
                throw std::runtime_error("config: unknown engine key '" + item.key() + "'");
        EngineConfig& e = cfg.engine;
        read_key(*it, "population_size", e.population_size);
        read_key(*it, "generations", e.generations);
        read_key(*it, "tournament_size", e.tournament_size);
        read_key(*it, "crossover_prob", e.crossover_prob);
        read_key(*it, "mutation_prob_per_codon", e.mutation_prob_per_codon);
        read_key(*it, "pruning_prob", e.pruning_prob);
        read_key(*it, "duplication_prob", e.duplication_prob);
        read_key(*it, "initial_max_genotype_length", e.initial_max_genotype_length);
        read_key(*it, "codon_min", e.codon_min);
        read_key(*it, "codon_max", e.codon_max);
        read_key(*it, "max_wraps", e.max_wraps);
        read_key(*it, "eval_threads", e.eval_threads);
        read_key(*it, "tracker_top_k", e.tracker_top_k);
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    const EngineConfig& e = cfg.engine;
    return json{
        {"datasets", cfg.datasets},
        {"methods", cfg.methods},
        {"runs_per_method", cfg.runs_per_method},
        {"trn_fraction", cfg.trn_fraction},
        {"ab_fraction", cfg.ab_fraction},
        {"base_seed", cfg.base_seed},
        {"output_dir", cfg.output_dir},
        {"data_dir", cfg.data_dir},
        {"grammar_file", cfg.grammar_file},
        {"parallel_jobs", cfg.parallel_jobs},
        {"engine",
         {{"population_size", e.population_size},
          {"generations", e.generations},
          {"tournament_size", e.tournament_size},
          {"crossover_prob", e.crossover_prob},
          {"mutation_prob_per_codon", e.mutation_prob_per_codon},
          {"pruning_prob", e.pruning_prob},
          {"duplication_prob", e.duplication_prob},
          {"initial_max_genotype_length", e.initial_max_genotype_length},
          {"codon_min", e.codon_min},
          {"codon_max", e.codon_max},
          {"max_wraps", e.max_wraps},
          {"eval_threads", e.eval_threads},
          {"tracker_top_k", e.tracker_top_k}}},
    };
}

ExperimentConfig load_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::vector<std::string> canonical_methods;
    canonical_methods.reserve(cfg.methods.size());
    for (const auto& m : cfg.methods)
        canonical_methods.push_back(StrategySpec::parse(m).to_string());
    std::string grammar_text = cfg.grammar_file.empty() ? std::string(default_grammar_text())
                                                        : read_file(cfg.grammar_file);
    const EngineConfig& e = cfg.engine;
    json j{
        {"datasets", cfg.datasets},
        {"methods", canonical_methods},
        {"runs_per_method", cfg.runs_per_method},
        {"trn_fraction", cfg.trn_fraction},
        {"ab_fraction", cfg.ab_fraction},
        {"base_seed", cfg.base_seed},
        {"grammar", grammar_text},
        {"engine",
         {{"population_size", e.population_size},
          {"generations", e.generations},
          {"tournament_size", e.tournament_size},
          {"crossover_prob", e.crossover_prob},
          {"mutation_prob_per_codon", e.mutation_prob_per_codon},
          {"pruning_prob", e.pruning_prob},
          {"duplication_prob", e.duplication_prob},
          {"initial_max_genotype_length", e.initial_max_genotype_length},
          {"codon_min", e.codon_min},
          {"codon_max", e.codon_max},
          {"max_wraps", e.max_wraps},
          {"tracker_top_k", e.tracker_top_k}}},
    };
    return hex64(fnv1a64(j.dump()));
}

json run_record_to_json(const RunRecord& r, const std::string& cfg_hash) {
    json gens = json::array();
    for (const GenerationLog& g : r.log)
        gens.push_back({{"best_fitness", enc_real(g.best_fitness)},
                        {"selection_error", enc_real(g.selection_error)},
                        {"trn_error", enc_real(g.trn_error)},
                        {"tree_size", g.tree_size}});
    return json{
        {"artifact_version", kArtifactVersion},
        {"config_hash", cfg_hash},
        {"dataset", r.dataset},
        {"method", r.method},
        {"run_index", r.run_index},
        {"base_seed", r.base_seed},
        {"run_seed", r.run_seed},
        {"trn_size", r.trn_size},
        {"tst_size", r.tst_size},
        {"trn_hash", r.trn_hash},
        {"tst_hash", r.tst_hash},
        {"pool_hash", r.pool_hash},
        {"trn_b_hash", r.trn_b_hash},
        {"vs_weight_w1", r.has_vs_weight ? json(r.vs_weight_w1) : json(nullptr)},
        {"generations", std::move(gens)},
        {"final_model", r.final_model},
        {"final_tree_size", r.final_tree_size},
        {"best_generation", r.best_generation},
        {"final_selection_error", enc_real(r.final_selection_error)},
        {"final_trn_error", enc_real(r.final_trn_error)},
        {"final_tst_error", enc_real(r.final_tst_error)},
    };
}

RunRecord run_record_from_json(const json& j) {
    RunRecord r;
    r.dataset = j.at("dataset").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.run_index = j.at("run_index").get<int>();
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.run_seed = j.at("run_seed").get<std::uint64_t>();
    r.trn_size = j.at("trn_size").get<int>();
    r.tst_size = j.at("tst_size").get<int>();
    r.trn_hash = j.at("trn_hash").get<std::string>();
    r.tst_hash = j.at("tst_hash").get<std::string>();
    r.pool_hash = j.at("pool_hash").get<std::string>();
    r.trn_b_hash = j.at("trn_b_hash").get<std::string>();
    if (!j.at("vs_weight_w1").is_null()) {
        r.has_vs_weight = true;
        r.vs_weight_w1 = j.at("vs_weight_w1").get<double>();
    }
    for (const json& g : j.at("generations"))
        r.log.push_back({dec_real(g.at("best_fitness"), "best_fitness"),
                         dec_real(g.at("selection_error"), "selection_error"),
                         dec_real(g.at("trn_error"), "trn_error"),
                         g.at("tree_size").get<int>()});
    r.final_model = j.at("final_model").get<std::string>();
    r.final_tree_size = j.at("final_tree_size").get<int>();
    r.best_generation = j.at("best_generation").get<int>();
    r.final_selection_error = dec_real(j.at("final_selection_error"), "final_selection_error");
    r.final_trn_error = dec_real(j.at("final_trn_error"), "final_trn_error");
    r.final_tst_error = dec_real(j.at("final_tst_error"), "final_tst_error");
    return r;
}

std::string RunKey::filename() const {
    char run[16];
    std::snprintf(run, sizeof(run), "%04d", run_index);
    return dataset + "__" + method + "__run" + run + ".json";
}

ResultStore::ResultStore(std::string directory) : dir_(std::move(directory)) {}

void ResultStore::init(const ExperimentConfig& cfg) {
    fs::create_directories(dir_);
    std::string hash = config_hash(cfg);
    std::string manifest_path = dir_ + "/manifest.json";
    if (fs::exists(manifest_path)) {
        json j = json::parse(read_file(manifest_path));
        std::string existing = j.at("config_hash").get<std::string>();
        if (existing != hash)
            throw std::runtime_error(dir_ + " holds a different experiment (config hash " +
                                     existing + ", this config hashes to " + hash + ")");
        config_ = config_from_json(j.at("config"));
    } else {
        json j{{"artifact_version", kArtifactVersion},
               {"config_hash", hash},
               {"config", config_to_json(cfg)}};
        write_file_atomic(manifest_path, j.dump(2) + "\n");
        config_ = cfg;
    }
    hash_ = hash;
    loaded_ = true;
}

void ResultStore::open() {
    std::string manifest_path = dir_ + "/manifest.json";
    if (!fs::exists(manifest_path))
        throw std::runtime_error(dir_ + ": no manifest.json (not an experiment directory)");
    json j = json::parse(read_file(manifest_path));
    hash_ = j.at("config_hash").get<std::string>();
    config_ = config_from_json(j.at("config"));
    loaded_ = true;
}

const ExperimentConfig& ResultStore::manifest_config() const {
    if (!loaded_) throw std::logic_error("result store not initialized");
    return config_;
}

const std::string& ResultStore::manifest_hash() const {
    if (!loaded_) throw std::logic_error("result store not initialized");
    return hash_;
}

bool ResultStore::has(const RunKey& key) const {
    return fs::exists(dir_ + "/" + key.filename());
}

void ResultStore::put(const RunRecord& record) {
    if (!loaded_) throw std::logic_error("result store not initialized");
    RunKey key{record.dataset, record.method, record.run_index};
    write_file_atomic(dir_ + "/" + key.filename(),
                      run_record_to_json(record, hash_).dump(2) + "\n");
}

RunRecord ResultStore::get(const RunKey& key) const {
    std::string path = dir_ + "/" + key.filename();
    if (!fs::exists(path))
        throw std::runtime_error("no record for " + key.dataset + "/" + key.method + "/run " +
                                 std::to_string(key.run_index));
    return run_record_from_json(json::parse(read_file(path)));
}

std::vector<RunKey> ResultStore::keys() const {
    std::vector<RunKey> out;
    if (!fs::exists(dir_)) return out;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".json" || name == "manifest.json") continue;
        auto first = name.find("__");
        auto second = name.find("__run", first == std::string::npos ? 0 : first + 2);
        if (first == std::string::npos || second == std::string::npos) continue;
        RunKey key;
        key.dataset = name.substr(0, first);
        key.method = name.substr(first + 2, second - first - 2);
        key.run_index = std::atoi(name.substr(second + 5).c_str());
        out.push_back(std::move(key));
    }
    std::sort(out.begin(), out.end());
    return out;
}

void ResultStore::write_index_csv() const {
    std::ostringstream out;
    out << "dataset,method,run_index,final_tst_error,final_trn_error,final_tree_size,"
           "best_generation,file\n";
    for (const RunKey& key : keys()) {
        RunRecord r = get(key);
        out << r.dataset << "," << r.method << "," << r.run_index << ","
            << format_real(r.final_tst_error) << "," << format_real(r.final_trn_error) << ","
            << r.final_tree_size << "," << r.best_generation << "," << key.filename() << "\n";
    }
    write_file_atomic(dir_ + "/index.csv", out.str());
}

namespace {

struct SeedRegistry {
    std::unordered_map<std::uint64_t, std::string> seen;

    void add(std::uint64_t seed, const std::string& what) {
        auto [it, fresh] = seen.emplace(seed, what);
        if (!fresh)
            throw std::runtime_error("seed collision between '" + it->second + "' and '" + what +
                                     "' (both derive " + std::to_string(seed) +
                                     "); change base_seed");
    }
};

RunRecord execute_run(const ExperimentConfig& cfg, const Grammar& grammar_template,
                      const Dataset& ds, const std::string& method, int run_index) {
    StrategySpec spec = StrategySpec::parse(method);
    auto [trn, tst] = split_trn_tst(ds, SplitSpec{cfg.trn_fraction, run_index, cfg.base_seed});
    Rng ab_rng(derive_seed(cfg.base_seed, {"ab", ds.name, std::to_string(run_index)}));
    DataSplit split = make_split(trn, spec, cfg.ab_fraction, ab_rng);
    std::uint64_t run_seed =
        derive_seed(cfg.base_seed, {"run", ds.name, method, std::to_string(run_index)});
    Rng breed_rng(derive_seed(run_seed, {"breed"}));
    Rng strat_rng(derive_seed(run_seed, {"strategy"}));
    Grammar grammar = instantiate_vars(grammar_template, ds.n_features);
    RunData data{&ds, std::move(trn), std::move(tst), std::move(split)};
    RunLabels labels{ds.name, method, run_index, cfg.base_seed, run_seed};
    return run_evolution(cfg.engine, grammar, spec, data, labels, breed_rng, strat_rng);
}

} // namespace

ResultStore run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::string grammar_text = cfg.grammar_file.empty() ? std::string(default_grammar_text())
                                                        : read_file(cfg.grammar_file);
    Grammar grammar_template = parse_grammar(grammar_text);

    std::vector<std::string> methods;
    methods.reserve(cfg.methods.size());
    for (const auto& m : cfg.methods) methods.push_back(StrategySpec::parse(m).to_string());

    ResultStore store(cfg.output_dir);
    store.init(cfg);

    std::map<std::string, Dataset> datasets;
    for (const auto& name : cfg.datasets)
        datasets.emplace(name, make_dataset(name, cfg.base_seed, cfg.data_dir));

    // Every derived seed in the grid must be distinct, or two streams would
    // replay each other.
    {
        SeedRegistry registry;
        for (const auto& name : cfg.datasets) {
            registry.add(derive_seed(cfg.base_seed, {"data", name}), "data " + name);
            for (int run = 0; run < cfg.runs_per_method; ++run) {
                std::string run_str = std::to_string(run);
                registry.add(derive_seed(cfg.base_seed, {"split", name, run_str}),
                             "split " + name + "/" + run_str);
                registry.add(derive_seed(cfg.base_seed, {"ab", name, run_str}),
                             "ab " + name + "/" + run_str);
                for (const auto& method : methods) {
                    std::uint64_t run_seed =
                        derive_seed(cfg.base_seed, {"run", name, method, run_str});
                    std::string what = "run " + name + "/" + method + "/" + run_str;
                    registry.add(run_seed, what);
                    registry.add(derive_seed(run_seed, {"breed"}), what + " breed");
                    registry.add(derive_seed(run_seed, {"strategy"}), what + " strategy");
                }
            }
        }
    }

    struct Job {
        std::string dataset;
        std::string method;
        int run_index;
    };
    std::vector<Job> pending;
    std::size_t total = 0;
    for (const auto& name : cfg.datasets)
        for (const auto& method : methods)
            for (int run = 0; run < cfg.runs_per_method; ++run) {
                ++total;
                if (!store.has(RunKey{name, method, run})) pending.push_back({name, method, run});
            }

    std::cerr << "experiment: " << total << " runs, " << (total - pending.size())
              << " already stored, " << pending.size() << " to go\n";
    std::mutex mutex;
    std::size_t completed = total - pending.size();
    parallel_for(pending.size(), cfg.parallel_jobs, [&](std::size_t i) {
        const Job& job = pending[i];
        auto started = std::chrono::steady_clock::now();
        RunRecord record = execute_run(cfg, grammar_template, datasets.at(job.dataset),
                                       job.method, job.run_index);
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                             .count();
        std::lock_guard<std::mutex> lock(mutex);
        store.put(record);
        ++completed;
        char line[256];
        std::snprintf(line, sizeof(line), "[%zu/%zu] %s %s run %d: tst_error=%s (%.1fs)\n",
                      completed, total, job.dataset.c_str(), job.method.c_str(), job.run_index,
                      format_real(record.final_tst_error).c_str(), seconds);
        std::cerr << line;
    });
    store.write_index_csv();
    return store;
}

Analysis analyze(const ResultStore& store) {
    const ExperimentConfig& cfg = store.manifest_config();
    std::vector<std::string> methods;
    methods.reserve(cfg.methods.size());
    for (const auto& m : cfg.methods) methods.push_back(StrategySpec::parse(m).to_string());

    std::vector<std::string> missing;
    for (const auto& ds : cfg.datasets)
        for (const auto& method : methods)
            for (int run = 0; run < cfg.runs_per_method; ++run)
                if (!store.has(RunKey{ds, method, run}))
                    missing.push_back(ds + "/" + method + "/run " + std::to_string(run));
    if (!missing.empty()) {
        std::string msg = "analysis needs a complete grid; missing " +
                          std::to_string(missing.size()) + " record(s):";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i] + ";";
        if (missing.size() > 20) msg += " ...";
        throw IncompleteGridError(msg);
    }

    Analysis analysis;
    for (const auto& ds : cfg.datasets) {
        std::vector<std::pair<std::string, std::vector<double>>> tst_samples;
        std::map<std::string, std::vector<double>> trn_by_method;
        std::map<std::string, std::vector<double>> size_by_method;
        for (const auto& method : methods) {
            std::vector<double> tst;
            tst.reserve(static_cast<std::size_t>(cfg.runs_per_method));
            for (int run = 0; run < cfg.runs_per_method; ++run) {
                RunRecord r = store.get(RunKey{ds, method, run});
                tst.push_back(r.final_tst_error);
                trn_by_method[method].push_back(r.final_trn_error);
                size_by_method[method].push_back(static_cast<double>(r.final_tree_size));
            }
            tst_samples.emplace_back(method, std::move(tst));
        }

        DatasetAnalysis da;
        da.dataset = ds;
        if (methods.size() == 1) {
            AnalysisRow row;
            row.rank = 1;
            row.method = methods.front();
            row.tst = summarize(tst_samples.front().second);
            row.trn = summarize(trn_by_method.at(row.method));
            row.tree_size = summarize(size_by_method.at(row.method));
            da.rows.push_back(std::move(row));
        } else {
            RankTable table = rank_methods(tst_samples, analysis.alpha);
            for (const RankEntry& entry : table.entries) {
                AnalysisRow row;
                row.rank = entry.rank;
                row.method = entry.method;
                for (const auto& [name, values] : tst_samples)
                    if (name == entry.method) row.tst = summarize(values);
                row.trn = summarize(trn_by_method.at(entry.method));
                row.tree_size = summarize(size_by_method.at(entry.method));
                da.rows.push_back(std::move(row));
            }
        }
        analysis.datasets.push_back(std::move(da));
    }
    return analysis;
}

namespace {

json summary_to_json(const Summary& s) {
    json outliers = json::array();
    for (double v : s.outliers) outliers.push_back(enc_real(v));
    return json{{"count", s.count},
                {"infinite_count", s.infinite_count},
                {"median", enc_real(s.median)},
                {"mean", enc_real(s.mean)},
                {"stddev", enc_real(s.stddev)},
                {"q1", enc_real(s.q1)},
                {"q3", enc_real(s.q3)},
                {"whisker_low", enc_real(s.whisker_low)},
                {"whisker_high", enc_real(s.whisker_high)},
                {"outliers", std::move(outliers)}};
}

json boxplot_json(const std::string& dataset,
                  const std::vector<std::pair<std::string, Summary>>& method_summaries) {
    json methods = json::array();
    for (const auto& [method, summary] : method_summaries) {
        json entry = summary_to_json(summary);
        entry["method"] = method;
        methods.push_back(std::move(entry));
    }
    return json{{"dataset", dataset}, {"statistic", "final_tst_error"},
                {"methods", std::move(methods)}};
}

} // namespace

void write_analysis(const Analysis& analysis, const std::string& out_dir) {
    fs::create_directories(out_dir);
    json all = json::array();
    for (const DatasetAnalysis& da : analysis.datasets) {
        std::ostringstream csv;
        csv << "rank,method,tst_median,tst_mean,tst_stddev,trn_median,trn_mean,trn_stddev,"
               "size_median,size_mean,size_stddev\n";
        json rows = json::array();
        std::vector<std::pair<std::string, Summary>> box;
        for (const AnalysisRow& row : da.rows) {
            csv << row.rank << "," << row.method << "," << format_real(row.tst.median) << ","
                << format_real(row.tst.mean) << "," << format_real(row.tst.stddev) << ","
                << format_real(row.trn.median) << "," << format_real(row.trn.mean) << ","
                << format_real(row.trn.stddev) << "," << format_real(row.tree_size.median) << ","
                << format_real(row.tree_size.mean) << "," << format_real(row.tree_size.stddev)
                << "\n";
            rows.push_back({{"rank", row.rank},
                            {"method", row.method},
                            {"tst", summary_to_json(row.tst)},
                            {"trn", summary_to_json(row.trn)},
                            {"tree_size", summary_to_json(row.tree_size)}});
            box.emplace_back(row.method, row.tst);
        }
        write_file_atomic(out_dir + "/analysis_" + da.dataset + ".csv", csv.str());
        write_file_atomic(out_dir + "/boxplot_" + da.dataset + ".json",
                          boxplot_json(da.dataset, box).dump(2) + "\n");
        all.push_back({{"dataset", da.dataset}, {"rows", std::move(rows)}});
    }
    json doc{{"artifact_version", kArtifactVersion}, {"alpha", analysis.alpha},
             {"datasets", std::move(all)}};
    write_file_atomic(out_dir + "/analysis.json", doc.dump(2) + "\n");
}

json export_boxplot_data(const ResultStore& store, const std::string& dataset) {
    std::map<std::string, std::vector<double>> by_method;
    for (const RunKey& key : store.keys()) {
        if (key.dataset != dataset) continue;
        by_method[key.method].push_back(store.get(key).final_tst_error);
    }
    if (by_method.empty())
        throw std::invalid_argument("no records for dataset '" + dataset + "' in " +
                                    store.directory());
    std::vector<std::pair<std::string, Summary>> box;
    box.reserve(by_method.size());
    for (const auto& [method, values] : by_method) box.emplace_back(method, summarize(values));
    return boxplot_json(dataset, box);
}

} // namespace gesr
