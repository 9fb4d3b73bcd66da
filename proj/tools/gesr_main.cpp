#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gesr/dataset.hpp"
#include "gesr/experiment.hpp"
#include "gesr/grammar.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIncompleteGrid = 3;

std::vector<int> parse_genotype(const std::string& text) {
    std::vector<int> codons;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        std::size_t used = 0;
        int value = std::stoi(current, &used);
        if (used != current.size())
            throw CLI::ValidationError("genotype", "'" + current + "' is not an integer");
        if (value < 0 || value > 255)
            throw CLI::ValidationError("genotype",
                                       "codon " + current + " outside [0, 255]");
        codons.push_back(value);
        current.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t')
            flush();
        else
            current.push_back(c);
    }
    flush();
    if (codons.empty()) throw CLI::ValidationError("genotype", "no codons given");
    return codons;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_gen_data(const std::string& name, std::uint64_t seed, const std::string& out,
                 const std::string& data_dir) {
    gesr::Dataset ds = gesr::make_dataset(name, seed, data_dir);
    gesr::write_csv(ds, out);
    std::cout << out << ": " << ds.n_rows() << " rows, " << ds.n_features << " features, "
              << (ds.task == gesr::Task::classification ? "classification" : "regression")
              << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, int parallel_override, bool resume) {
    gesr::ExperimentConfig cfg = gesr::load_config(config_path);
    if (parallel_override > 0) cfg.parallel_jobs = parallel_override;
    (void)resume;  // completed runs are always skipped; the flag documents intent
    gesr::ResultStore store = gesr::run_experiment(cfg);
    std::cout << store.directory() << "\n";
    return kExitOk;
}

int cmd_analyze(const std::string& results_dir, const std::string& out_dir) {
    gesr::ResultStore store(results_dir);
    store.open();
    gesr::Analysis analysis = gesr::analyze(store);
    gesr::write_analysis(analysis, out_dir);
    for (const auto& da : analysis.datasets) {
        std::cout << da.dataset << ":\n";
        for (const auto& row : da.rows) {
            char line[160];
            std::snprintf(line, sizeof(line), "  rank %d  %-10s tst median %.4g\n", row.rank,
                          row.method.c_str(), row.tst.median);
            std::cout << line;
        }
    }
    std::cout << "analysis written to " << out_dir << "\n";
    return kExitOk;
}

int cmd_boxplot(const std::string& results_dir, const std::string& dataset,
                const std::string& out) {
    gesr::ResultStore store(results_dir);
    store.open();
    nlohmann::json j = gesr::export_boxplot_data(store, dataset);
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream stream(out, std::ios::binary | std::ios::trunc);
        if (!stream) throw std::runtime_error("cannot write " + out);
        stream << j.dump(2) << "\n";
        std::cout << out << "\n";
    }
    return kExitOk;
}

int cmd_map(const std::string& grammar_path, const std::string& genotype_text, int features) {
    std::string text = grammar_path.empty() ? std::string(gesr::default_grammar_text())
                                            : read_file(grammar_path);
    gesr::Grammar grammar = gesr::parse_grammar(text);
    if (features > 0) grammar = gesr::instantiate_vars(grammar, features);
    std::vector<int> codons = parse_genotype(genotype_text);
    gesr::TokenMapping mapping = gesr::map_genotype_tokens(grammar, codons, true);
    for (std::size_t i = 0; i < mapping.trace.size(); ++i) {
        const gesr::MappingStep& step = mapping.trace[i];
        std::printf("step %2zu  %-8s", i + 1, step.rule.c_str());
        if (step.codon >= 0)
            std::printf("codon %3d mod %d alternatives -> choice %d\n", step.codon,
                        step.alternatives, step.choice);
        else
            std::printf("single alternative, no codon\n");
    }
    if (!mapping.valid) {
        std::printf("invalid: ran out of codons expanding %s after consuming %d codon(s)\n",
                    mapping.failed_rule.c_str(), mapping.consumed);
        return kExitOk;
    }
    std::string phenotype;
    for (std::size_t i = 0; i < mapping.tokens.size(); ++i) {
        if (i > 0) phenotype += ' ';
        phenotype += mapping.tokens[i];
    }
    std::printf("phenotype: %s\nconsumed: %d of %zu codon(s)\n", phenotype.c_str(),
                mapping.consumed, codons.size());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grammatical-evolution benchmark tool"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-data", "Generate or load a dataset and write it as CSV");
    std::string gen_name, gen_out, gen_data_dir = "data";
    std::uint64_t gen_seed = 1;
    gen->add_option("name", gen_name, "Dataset name")
        ->required()
        ->check(CLI::IsMember(gesr::dataset_names()));
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output CSV path")->required();
    gen->add_option("--data-dir", gen_data_dir, "Directory with the source CSV files");

    auto* run = app.add_subcommand("run", "Run the experiment grid described by a config file");
    std::string run_config;
    int run_parallel = 0;
    bool run_resume = false;
    run->add_option("--config", run_config, "JSON config file")->required();
    run->add_option("--parallel", run_parallel, "Override the number of parallel runs");
    run->add_flag("--resume", run_resume, "Continue a partially completed experiment");

    auto* analyze = app.add_subcommand("analyze", "Rank methods and summarize a finished grid");
    std::string an_results, an_out;
    analyze->add_option("--results", an_results, "Experiment output directory")->required();
    analyze->add_option("--out", an_out, "Directory for the analysis files")->required();

    auto* boxplot = app.add_subcommand("boxplot", "Emit box-plot data for one dataset");
    std::string box_results, box_dataset, box_out;
    boxplot->add_option("--results", box_results, "Experiment output directory")->required();
    boxplot->add_option("--dataset", box_dataset, "Dataset name")->required();
    boxplot->add_option("--out", box_out, "Output file (default: stdout)");

    auto* map = app.add_subcommand("map", "Trace a genotype through the grammar");
    std::string map_grammar, map_genotype;
    int map_features = 0;
    map->add_option("--grammar", map_grammar, "BNF grammar file (default: built-in)");
    map->add_option("--genotype", map_genotype, "Comma- or space-separated codons in [0, 255]")
        ->required();
    map->add_option("--features", map_features, "Instantiate this many feature variables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_name, gen_seed, gen_out, gen_data_dir);
        if (run->parsed()) return cmd_run(run_config, run_parallel, run_resume);
        if (analyze->parsed()) return cmd_analyze(an_results, an_out);
        if (boxplot->parsed()) return cmd_boxplot(box_results, box_dataset, box_out);
        if (map->parsed()) return cmd_map(map_grammar, map_genotype, map_features);
    } catch (const gesr::IncompleteGridError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIncompleteGrid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
