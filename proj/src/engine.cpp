#include "gesr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "gesr/stats.hpp"

namespace gesr {

void EngineConfig::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument(std::string("engine config: ") + name +
                                        " must be in [0, 1]");
    };
    if (population_size < 1)
        throw std::invalid_argument("engine config: population_size must be >= 1");
    if (generations < 0)
        throw std::invalid_argument("engine config: generations must be >= 0");
    if (tournament_size < 1)
        throw std::invalid_argument("engine config: tournament_size must be >= 1");
    if (initial_max_genotype_length < 1)
        throw std::invalid_argument("engine config: initial_max_genotype_length must be >= 1");
    if (codon_min > codon_max)
        throw std::invalid_argument("engine config: empty codon range");
    if (max_wraps != 0)
        throw std::invalid_argument("engine config: wrapping is not supported (max_wraps = 0)");
    if (eval_threads < 1)
        throw std::invalid_argument("engine config: eval_threads must be >= 1");
    if (tracker_top_k < 0)
        throw std::invalid_argument("engine config: tracker_top_k must be >= 0");
    prob(crossover_prob, "crossover_prob");
    prob(mutation_prob_per_codon, "mutation_prob_per_codon");
    prob(pruning_prob, "pruning_prob");
    prob(duplication_prob, "duplication_prob");
}

Individual make_individual(const Grammar& grammar, std::vector<int> genotype) {
    Individual ind;
    ind.genotype = std::move(genotype);
    ind.mapping = map_genotype(grammar, ind.genotype);
    if (ind.mapping.valid) ind.phenotype = ind.mapping.tree.to_text();
    return ind;
}

std::vector<Individual> init_population(const EngineConfig& cfg, const Grammar& grammar,
                                        Rng& rng) {
    std::vector<Individual> population;
    population.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int i = 0; i < cfg.population_size; ++i) {
        int length = uniform_int(rng, 1, cfg.initial_max_genotype_length);
        std::vector<int> genotype(static_cast<std::size_t>(length));
        for (int& codon : genotype) codon = uniform_int(rng, cfg.codon_min, cfg.codon_max);
        population.push_back(make_individual(grammar, std::move(genotype)));
    }
    return population;
}

namespace {

// Selection/elitism ordering: fitness, then tree size, then population index.
bool better(const Individual& a, int ia, const Individual& b, int ib) {
    if (a.fitness != b.fitness) return a.fitness < b.fitness;
    if (a.tree_size() != b.tree_size()) return a.tree_size() < b.tree_size();
    return ia < ib;
}

} // namespace

int tournament_select(const std::vector<Individual>& population, int k, Rng& rng) {
    if (population.empty()) throw std::invalid_argument("tournament_select: empty population");
    if (k < 1) throw std::invalid_argument("tournament_select: k must be >= 1");
    int n = static_cast<int>(population.size());
    int winner = uniform_int(rng, 0, n - 1);
    for (int i = 1; i < k; ++i) {
        int challenger = uniform_int(rng, 0, n - 1);
        if (better(population[static_cast<std::size_t>(challenger)], challenger,
                   population[static_cast<std::size_t>(winner)], winner))
            winner = challenger;
    }
    return winner;
}

std::pair<std::vector<int>, std::vector<int>> crossover_at(std::span<const int> p1,
                                                           std::span<const int> p2, int c1,
                                                           int c2) {
    if (c1 < 0 || c1 > static_cast<int>(p1.size()) || c2 < 0 || c2 > static_cast<int>(p2.size()))
        throw std::invalid_argument("crossover_at: cut point out of range");
    std::vector<int> child1, child2;
    child1.reserve(static_cast<std::size_t>(c1) + p2.size() - static_cast<std::size_t>(c2));
    child2.reserve(static_cast<std::size_t>(c2) + p1.size() - static_cast<std::size_t>(c1));
    child1.insert(child1.end(), p1.begin(), p1.begin() + c1);
    child1.insert(child1.end(), p2.begin() + c2, p2.end());
    child2.insert(child2.end(), p2.begin(), p2.begin() + c2);
    child2.insert(child2.end(), p1.begin() + c1, p1.end());
    return {std::move(child1), std::move(child2)};
}

std::pair<std::vector<int>, std::vector<int>> ripple_crossover(std::span<const int> p1,
                                                               std::span<const int> p2,
                                                               double prob,
                                                               const EngineConfig& cfg,
                                                               Rng& rng) {
    if (p1.empty() || p2.empty())
        throw std::invalid_argument("ripple_crossover: empty parent genotype");
    if (!chance(rng, prob))
        return {std::vector<int>(p1.begin(), p1.end()), std::vector<int>(p2.begin(), p2.end())};
    int c1 = uniform_int(rng, 0, static_cast<int>(p1.size()));
    int c2 = uniform_int(rng, 0, static_cast<int>(p2.size()));
    auto children = crossover_at(p1, p2, c1, c2);
    if (children.first.empty())
        children.first.push_back(uniform_int(rng, cfg.codon_min, cfg.codon_max));
    if (children.second.empty())
        children.second.push_back(uniform_int(rng, cfg.codon_min, cfg.codon_max));
    return children;
}

std::vector<int> mutate(std::span<const int> g, double per_codon_prob, const EngineConfig& cfg,
                        Rng& rng) {
    std::vector<int> out(g.begin(), g.end());
    for (int& codon : out)
        if (chance(rng, per_codon_prob)) codon = uniform_int(rng, cfg.codon_min, cfg.codon_max);
    return out;
}

std::vector<int> duplicate_at(std::span<const int> g, int start, int len) {
    if (start < 0 || len < 1 || start + len > static_cast<int>(g.size()))
        throw std::invalid_argument("duplicate_at: segment out of range");
    std::vector<int> out(g.begin(), g.end());
    out.insert(out.end(), g.begin() + start, g.begin() + start + len);
    return out;
}

std::vector<int> duplicate(std::span<const int> g, double prob, Rng& rng) {
    if (g.empty()) throw std::invalid_argument("duplicate: empty genotype");
    if (!chance(rng, prob)) return std::vector<int>(g.begin(), g.end());
    int start = uniform_int(rng, 0, static_cast<int>(g.size()) - 1);
    int len = uniform_int(rng, 1, static_cast<int>(g.size()) - start);
    return duplicate_at(g, start, len);
}

void prune(Individual& ind, double prob, Rng& rng) {
    bool fire = chance(rng, prob);  // always one draw, valid or not
    if (!fire || !ind.mapping.valid) return;
    // keep at least one codon so the variation operators always have
    // material to work with (a start rule with a single alternative can
    // consume nothing at all)
    int keep = std::max(ind.mapping.consumed, 1);
    if (keep < static_cast<int>(ind.genotype.size()))
        ind.genotype.resize(static_cast<std::size_t>(keep));
}

std::string hash_indices(std::span<const int> indices) {
    std::string buf;
    buf.reserve(indices.size() * 4);
    for (int v : indices) {
        buf += std::to_string(v);
        buf += ',';
    }
    return hex64(fnv1a64(buf));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluates every distinct valid phenotype over the full training rows once
// per generation; fitness and selection errors are then index-set
// aggregations over the cached outputs. No RNG is consumed here, and each
// output slot is written by exactly one worker, so results are identical for
// any eval_threads value.
class GenerationEvaluator {
public:
    GenerationEvaluator(const Dataset& ds, std::span<const int> trn_rows, int threads)
        : ds_(ds), threads_(threads), rows_(trn_rows.begin(), trn_rows.end()) {
        position_of_row_.assign(static_cast<std::size_t>(ds.n_rows()), -1);
        targets_.reserve(rows_.size());
        for (std::size_t p = 0; p < rows_.size(); ++p) {
            position_of_row_[static_cast<std::size_t>(rows_[p])] = static_cast<int>(p);
            targets_.push_back(ds.targets[static_cast<std::size_t>(rows_[p])]);
        }
    }

    void evaluate_population(const std::vector<Individual>& population) {
        slot_trees_.clear();
        slot_of_individual_.assign(population.size(), -1);
        cache_.clear();
        for (std::size_t i = 0; i < population.size(); ++i) {
            const Individual& ind = population[i];
            if (!ind.mapping.valid) continue;
            auto [it, fresh] =
                cache_.try_emplace(std::string_view(ind.phenotype),
                                   static_cast<int>(slot_trees_.size()));
            if (fresh) slot_trees_.push_back(&ind.mapping.tree);
            slot_of_individual_[i] = it->second;
        }
        slot_outputs_.assign(slot_trees_.size(), {});
        parallel_for(slot_trees_.size(), threads_, [&](std::size_t s) {
            std::vector<double>& out = slot_outputs_[s];
            out.resize(rows_.size());
            const ExpressionTree& tree = *slot_trees_[s];
            for (std::size_t p = 0; p < rows_.size(); ++p) {
                EvalResult r = tree.evaluate(ds_.row(rows_[static_cast<std::size_t>(p)]));
                out[p] = r.ok ? r.value : kNaN;
            }
        });
    }

    int slot_of(std::size_t individual) const { return slot_of_individual_[individual]; }

    // Error over an index multiset (dataset row ids); repeated rows count
    // with multiplicity. Any math-error row makes the result +inf.
    double subset_error(int slot, std::span<const int> rows) const {
        const std::vector<double>& out = slot_outputs_[static_cast<std::size_t>(slot)];
        if (ds_.task == Task::classification) {
            std::size_t wrong = 0;
            for (int row : rows) {
                int p = position_of_row_[static_cast<std::size_t>(row)];
                double o = out[static_cast<std::size_t>(p)];
                if (!std::isfinite(o)) return kInf;
                int predicted = o < 0.0 ? 0 : 1;
                if (predicted != (targets_[static_cast<std::size_t>(p)] != 0.0 ? 1 : 0)) ++wrong;
            }
            return static_cast<double>(wrong) / static_cast<double>(rows.size());
        }
        double sum = 0.0;
        for (int row : rows) {
            int p = position_of_row_[static_cast<std::size_t>(row)];
            double o = out[static_cast<std::size_t>(p)];
            if (!std::isfinite(o)) return kInf;
            double r = o - targets_[static_cast<std::size_t>(p)];
            sum += r * r;
        }
        if (!std::isfinite(sum)) return kInf;
        return std::sqrt(sum / static_cast<double>(rows.size()));
    }

    // Error over every training row (the aggregation the tracker caches).
    double full_error(int slot) const {
        const std::vector<double>& out = slot_outputs_[static_cast<std::size_t>(slot)];
        if (ds_.task == Task::classification) {
            std::size_t wrong = 0;
            for (std::size_t p = 0; p < out.size(); ++p) {
                if (!std::isfinite(out[p])) return kInf;
                int predicted = out[p] < 0.0 ? 0 : 1;
                if (predicted != (targets_[p] != 0.0 ? 1 : 0)) ++wrong;
            }
            return static_cast<double>(wrong) / static_cast<double>(out.size());
        }
        double sum = 0.0;
        for (std::size_t p = 0; p < out.size(); ++p) {
            if (!std::isfinite(out[p])) return kInf;
            double r = out[p] - targets_[p];
            sum += r * r;
        }
        if (!std::isfinite(sum)) return kInf;
        return std::sqrt(sum / static_cast<double>(out.size()));
    }

private:
    const Dataset& ds_;
    int threads_;
    std::vector<int> rows_;
    std::vector<double> targets_;       // per row position
    std::vector<int> position_of_row_;  // dataset row id -> position in rows_
    std::vector<const ExpressionTree*> slot_trees_;
    std::vector<std::vector<double>> slot_outputs_;
    std::vector<int> slot_of_individual_;
    std::unordered_map<std::string_view, int> cache_;
};

struct Tracker {
    bool has = false;
    ExpressionTree tree;
    std::string phenotype;
    double selection_error = kInf;
    double trn_error = kInf;
    int tree_size = 0;
    int generation = -1;

    // Strict improvement required; ties keep the incumbent.
    bool offer(const Individual& ind, double sel_err, double trn_err, int gen) {
        if (!(sel_err < selection_error)) return false;
        has = true;
        tree = ind.mapping.tree;
        phenotype = ind.phenotype;
        selection_error = sel_err;
        trn_error = trn_err;
        tree_size = ind.tree_size();
        generation = gen;
        return true;
    }
};

void assign_fitness(std::vector<Individual>& population, GenerationEvaluator& evaluator,
                    const StrategySpec& spec, const GenerationSets& sets,
                    const DataSplit& split) {
    for (std::size_t i = 0; i < population.size(); ++i) {
        Individual& ind = population[i];
        int slot = evaluator.slot_of(i);
        if (slot < 0) {
            ind.fitness = kInf;
            continue;
        }
        double err_a = evaluator.subset_error(slot, sets.trn_a);
        if (!std::isfinite(err_a)) {
            ind.fitness = kInf;
            continue;
        }
        if (spec.is_vs()) {
            double err_b = evaluator.subset_error(slot, split.trn_b);
            ind.fitness = std::isfinite(err_b) ? compute_fitness(spec, err_a, err_b) : kInf;
        } else {
            ind.fitness = err_a;
        }
    }
}

void update_tracker(const std::vector<Individual>& population, GenerationEvaluator& evaluator,
                    const StrategySpec& spec, const DataSplit& split, int top_k, Tracker& tracker,
                    int generation) {
    std::vector<std::size_t> candidates;
    candidates.reserve(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
        if (std::isfinite(population[i].fitness)) candidates.push_back(i);
    if (top_k > 0 && static_cast<std::size_t>(top_k) < candidates.size()) {
        std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
            return better(population[a], static_cast<int>(a), population[b],
                          static_cast<int>(b));
        });
        candidates.resize(static_cast<std::size_t>(top_k));
        std::sort(candidates.begin(), candidates.end());  // scan in population order
    }
    for (std::size_t i : candidates) {
        const Individual& ind = population[i];
        int slot = evaluator.slot_of(i);
        double sel;
        if (spec.is_vs()) {
            sel = ind.fitness;
        } else {
            sel = evaluator.subset_error(slot, split.trn_b);
            if (!std::isfinite(sel)) continue;
        }
        if (sel < tracker.selection_error)
            tracker.offer(ind, sel, evaluator.full_error(slot), generation);
    }
}

std::vector<Individual> breed(const std::vector<Individual>& population, const EngineConfig& cfg,
                              const Grammar& grammar, Rng& rng) {
    std::vector<Individual> next;
    next.reserve(population.size());
    int elite = 0;
    for (int i = 1; i < static_cast<int>(population.size()); ++i)
        if (better(population[static_cast<std::size_t>(i)], i,
                   population[static_cast<std::size_t>(elite)], elite))
            elite = i;
    next.push_back(population[static_cast<std::size_t>(elite)]);
    while (next.size() < population.size()) {
        int ia = tournament_select(population, cfg.tournament_size, rng);
        int ib = tournament_select(population, cfg.tournament_size, rng);
        auto [g1, g2] = ripple_crossover(population[static_cast<std::size_t>(ia)].genotype,
                                         population[static_cast<std::size_t>(ib)].genotype,
                                         cfg.crossover_prob, cfg, rng);
        g1 = mutate(g1, cfg.mutation_prob_per_codon, cfg, rng);
        g2 = mutate(g2, cfg.mutation_prob_per_codon, cfg, rng);
        g1 = duplicate(g1, cfg.duplication_prob, rng);
        g2 = duplicate(g2, cfg.duplication_prob, rng);
        Individual c1 = make_individual(grammar, std::move(g1));
        Individual c2 = make_individual(grammar, std::move(g2));
        // The second child's draws happen even when it is discarded below, so
        // the stream position never depends on population-size parity.
        prune(c1, cfg.pruning_prob, rng);
        prune(c2, cfg.pruning_prob, rng);
        next.push_back(std::move(c1));
        if (next.size() < population.size()) next.push_back(std::move(c2));
    }
    return next;
}

double population_best_fitness(const std::vector<Individual>& population) {
    double best = kInf;
    for (const Individual& ind : population) best = std::min(best, ind.fitness);
    return best;
}

} // namespace

RunRecord run_evolution(const EngineConfig& cfg, const Grammar& grammar, StrategySpec spec,
                        const RunData& data, const RunLabels& labels, Rng& breed_rng,
                        Rng& strat_rng) {
    cfg.validate();
    grammar.validate();
    if (!data.dataset) throw std::invalid_argument("run_evolution: null dataset");
    if (data.trn.empty() || data.tst.empty())
        throw std::invalid_argument("run_evolution: empty training or test rows");
    if (data.split.trn_a_pool.empty() || data.split.trn_b.empty())
        throw std::logic_error("run_evolution: strategy split has an empty side");
    const Dataset& ds = *data.dataset;

    RunRecord record;
    record.dataset = labels.dataset;
    record.method = labels.method;
    record.run_index = labels.run_index;
    record.base_seed = labels.base_seed;
    record.run_seed = labels.run_seed;
    record.trn_size = static_cast<int>(data.trn.size());
    record.tst_size = static_cast<int>(data.tst.size());
    record.trn_hash = hash_indices(data.trn);
    record.tst_hash = hash_indices(data.tst);
    record.pool_hash = hash_indices(data.split.trn_a_pool);
    record.trn_b_hash = hash_indices(data.split.trn_b);

    if (spec.is_vs()) {
        spec.vs_weight_w1 = uniform_real(strat_rng, 0.0, 1.0);
        record.has_vs_weight = true;
        record.vs_weight_w1 = spec.vs_weight_w1;
    }

    GenerationEvaluator evaluator(ds, data.trn, cfg.eval_threads);
    Tracker tracker;

    std::vector<Individual> population = init_population(cfg, grammar, breed_rng);
    GenerationSets sets = generation_sets(spec, data.split, 0, strat_rng);
    evaluator.evaluate_population(population);
    assign_fitness(population, evaluator, spec, sets, data.split);
    update_tracker(population, evaluator, spec, data.split, cfg.tracker_top_k, tracker, 0);

    record.log.reserve(static_cast<std::size_t>(cfg.generations));
    for (int gen = 1; gen <= cfg.generations; ++gen) {
        population = breed(population, cfg, grammar, breed_rng);
        sets = generation_sets(spec, data.split, gen, strat_rng);
        evaluator.evaluate_population(population);
        assign_fitness(population, evaluator, spec, sets, data.split);
        update_tracker(population, evaluator, spec, data.split, cfg.tracker_top_k, tracker, gen);
        record.log.push_back({population_best_fitness(population), tracker.selection_error,
                              tracker.trn_error, tracker.tree_size});
    }

    if (tracker.has) {
        record.final_model = tracker.phenotype;
        record.final_tree_size = tracker.tree_size;
        record.best_generation = tracker.generation;
        record.final_selection_error = tracker.selection_error;
        record.final_trn_error = tracker.trn_error;
        std::vector<double> outputs;
        std::vector<double> targets;
        outputs.reserve(data.tst.size());
        targets.reserve(data.tst.size());
        for (int row : data.tst) {
            EvalResult r = tracker.tree.evaluate(ds.row(row));
            outputs.push_back(r.ok ? r.value : kNaN);
            targets.push_back(ds.targets[static_cast<std::size_t>(row)]);
        }
        record.final_tst_error = ds.task == Task::classification
                                     ? classification_error(outputs, targets)
                                     : regression_error(outputs, targets);
    }
    return record;
}

void write_generation_log_csv(const RunRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    auto real = [](double v) {
        if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "generation,best_fitness,tracker_trnb_error,trn_error,tree_size\n";
    for (std::size_t i = 0; i < record.log.size(); ++i) {
        const GenerationLog& g = record.log[i];
        out << (i + 1) << "," << real(g.best_fitness) << "," << real(g.selection_error) << ","
            << real(g.trn_error) << "," << g.tree_size << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace gesr
