#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "gesr/rng.hpp"
#include "gesr/strategy.hpp"

using namespace gesr;

namespace {

std::vector<int> iota_rows(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 0);
    return v;
}

bool subset_of(const std::vector<int>& values, const std::vector<int>& pool) {
    return std::all_of(values.begin(), values.end(), [&](int v) {
        return std::find(pool.begin(), pool.end(), v) != pool.end();
    });
}

} // namespace

TEST_SUITE("strategy") {

TEST_CASE("strategy names parse and print canonically") {
    auto kind_of = [](const char* name) { return StrategySpec::parse(name).kind; };
    CHECK(kind_of("std") == StrategyKind::std_full);
    CHECK(kind_of("bw") == StrategyKind::bw);
    CHECK(kind_of("vs") == StrategyKind::vs);
    CHECK(kind_of("rst-1-1") == StrategyKind::rst11);
    CHECK(kind_of("ri") == StrategyKind::ri);
    CHECK(kind_of("rst-r") == StrategyKind::rstr);
    CHECK(kind_of("vrst-1-1") == StrategyKind::vrst11);
    CHECK(kind_of("vri") == StrategyKind::vri);
    CHECK(kind_of("vrst-r") == StrategyKind::vrstr);

    CHECK(StrategySpec::parse("ri").ri_percentage == 0.6);       // default percentage
    CHECK(StrategySpec::parse("ri-75").ri_percentage == 0.75);
    CHECK(StrategySpec::parse("vri-12.5").ri_percentage == 0.125);
    CHECK(StrategySpec::parse("ri-75").to_string() == "ri-75");
    CHECK(StrategySpec::parse("ri").to_string() == "ri-60");
    CHECK(StrategySpec::parse("vri").to_string() == "vri-60");
    for (const char* name : {"std", "bw", "vs", "rst-1-1", "rst-r", "vrst-1-1", "vrst-r"})
        CHECK(StrategySpec::parse(name).to_string() == name);

    // names are case- and whitespace-insensitive
    CHECK(StrategySpec::parse(" STD ").kind == StrategyKind::std_full);
    CHECK(StrategySpec::parse("RST-1-1").kind == StrategyKind::rst11);

    for (const char* bad : {"", "xyz", "ri-", "ri-101", "ri--5", "rst", "v", "std full"})
        CHECK_THROWS_AS(StrategySpec::parse(bad), std::invalid_argument);
}

TEST_CASE("only the validation family holds out a selection half") {
    for (const char* name : {"bw", "vs", "vrst-1-1", "vri", "vrst-r"})
        CHECK(StrategySpec::parse(name).uses_validation_split());
    for (const char* name : {"std", "rst-1-1", "ri", "rst-r"})
        CHECK_FALSE(StrategySpec::parse(name).uses_validation_split());
    CHECK(StrategySpec::parse("vs").is_vs());
    CHECK_FALSE(StrategySpec::parse("bw").is_vs());
}

TEST_CASE("non-validation splits reuse the whole training set without drawing") {
    std::vector<int> trn = iota_rows(10);
    Rng rng(100);
    Rng untouched(100);
    DataSplit split = make_split(trn, StrategySpec::parse("std"), 0.5, rng);
    CHECK(split.trn_indices == trn);
    CHECK(split.trn_a_pool == trn);
    CHECK(split.trn_b == trn);
    CHECK(rng() == untouched());  // no draws consumed
}

TEST_CASE("validation splits partition the training set") {
    std::vector<int> trn = iota_rows(100);
    Rng rng(200);
    DataSplit split = make_split(trn, StrategySpec::parse("bw"), 0.5, rng);
    CHECK(split.trn_indices == trn);
    CHECK(split.trn_a_pool.size() == 50);
    CHECK(split.trn_b.size() == 50);
    CHECK(std::is_sorted(split.trn_a_pool.begin(), split.trn_a_pool.end()));
    CHECK(std::is_sorted(split.trn_b.begin(), split.trn_b.end()));
    std::set<int> all(split.trn_a_pool.begin(), split.trn_a_pool.end());
    all.insert(split.trn_b.begin(), split.trn_b.end());
    CHECK(all.size() == 100);

    Rng rng2(200);
    DataSplit again = make_split(trn, StrategySpec::parse("vs"), 0.5, rng2);
    CHECK(again.trn_a_pool == split.trn_a_pool);  // only the seed matters

    Rng rng3(200);
    DataSplit seventy = make_split(trn, StrategySpec::parse("vri"), 0.7, rng3);
    CHECK(seventy.trn_a_pool.size() == 70);
    CHECK(seventy.trn_b.size() == 30);

    std::vector<int> single = {42};
    Rng rng4(1);
    CHECK_THROWS_AS(make_split(single, StrategySpec::parse("bw"), 0.5, rng4),
                    std::invalid_argument);
    // non-validation strategies accept a single-row training set
    Rng rng5(1);
    CHECK(make_split(single, StrategySpec::parse("std"), 0.5, rng5).trn_b
          == std::vector<int>{42});
}

TEST_CASE("full-set strategies use the pool every generation") {
    std::vector<int> trn = iota_rows(20);
    Rng split_rng(7);
    for (const char* name : {"std", "bw", "vs"}) {
        StrategySpec spec = StrategySpec::parse(name);
        Rng rng(50);
        DataSplit split = make_split(trn, spec, 0.5, split_rng);
        for (int gen = 0; gen < 5; ++gen) {
            GenerationSets sets = generation_sets(spec, split, gen, rng);
            CHECK(sets.trn_a_is_full_pool);
            CHECK(sets.trn_a == split.trn_a_pool);
            CHECK(std::vector<int>(sets.trn_b.begin(), sets.trn_b.end()) == split.trn_b);
        }
    }
}

TEST_CASE("single-row strategies pick one pool row per generation") {
    std::vector<int> trn = iota_rows(30);
    for (const char* name : {"rst-1-1", "vrst-1-1"}) {
        StrategySpec spec = StrategySpec::parse(name);
        Rng split_rng(8);
        DataSplit split = make_split(trn, spec, 0.5, split_rng);
        Rng rng(51);
        std::set<int> seen;
        for (int gen = 0; gen < 400; ++gen) {
            GenerationSets sets = generation_sets(spec, split, gen, rng);
            CHECK_FALSE(sets.trn_a_is_full_pool);
            REQUIRE(sets.trn_a.size() == 1);
            CHECK(subset_of(sets.trn_a, split.trn_a_pool));
            seen.insert(sets.trn_a[0]);
        }
        // over 400 generations essentially every pool row appears
        CHECK(seen.size() >= split.trn_a_pool.size() - 2);
    }
}

TEST_CASE("random-interval strategies alternate single row and full pool") {
    std::vector<int> trn = iota_rows(40);
    StrategySpec spec = StrategySpec::parse("ri-60");
    Rng split_rng(9);
    DataSplit split = make_split(trn, spec, 0.5, split_rng);
    Rng rng(52);
    int singles = 0;
    const int gens = 2000;
    for (int gen = 0; gen < gens; ++gen) {
        GenerationSets sets = generation_sets(spec, split, gen, rng);
        if (sets.trn_a_is_full_pool) {
            CHECK(sets.trn_a == split.trn_a_pool);
        } else {
            REQUIRE(sets.trn_a.size() == 1);
            CHECK(subset_of(sets.trn_a, split.trn_a_pool));
            ++singles;
        }
    }
    double fraction = static_cast<double>(singles) / gens;
    CHECK(fraction > 0.55);
    CHECK(fraction < 0.65);

    // percentage 0 always uses the full pool; 100 never does
    StrategySpec never = StrategySpec::parse("ri-0");
    StrategySpec always = StrategySpec::parse("ri-100");
    Rng r2(53);
    for (int gen = 0; gen < 50; ++gen) {
        CHECK(generation_sets(never, split, gen, r2).trn_a_is_full_pool);
        CHECK(generation_sets(always, split, gen, r2).trn_a.size() == 1);
    }
}

TEST_CASE("random-size strategies sample with replacement from the pool") {
    std::vector<int> trn = iota_rows(200);
    StrategySpec spec = StrategySpec::parse("vrst-r");
    Rng split_rng(10);
    DataSplit split = make_split(trn, spec, 0.5, split_rng);  // pool of 100
    Rng rng(54);
    double total = 0.0;
    bool saw_repeat = false;
    const int gens = 2000;
    for (int gen = 0; gen < gens; ++gen) {
        GenerationSets sets = generation_sets(spec, split, gen, rng);
        CHECK_FALSE(sets.trn_a_is_full_pool);
        REQUIRE(sets.trn_a.size() >= 1);
        REQUIRE(sets.trn_a.size() <= split.trn_a_pool.size());
        CHECK(subset_of(sets.trn_a, split.trn_a_pool));
        std::set<int> unique(sets.trn_a.begin(), sets.trn_a.end());
        if (unique.size() < sets.trn_a.size()) saw_repeat = true;
        total += static_cast<double>(sets.trn_a.size());
    }
    double mean_fraction = total / gens / static_cast<double>(split.trn_a_pool.size());
    CHECK(mean_fraction > 0.45);   // sizes are uniform on [1, pool size]
    CHECK(mean_fraction < 0.56);
    CHECK(saw_repeat);
}

TEST_CASE("fitness composition") {
    StrategySpec std_spec = StrategySpec::parse("std");
    CHECK(compute_fitness(std_spec, 0.2, 0.9) == 0.2);

    StrategySpec vs = StrategySpec::parse("vs");
    vs.vs_weight_w1 = 0.5;
    CHECK(compute_fitness(vs, 0.2, 0.1) == doctest::Approx(0.15));
    vs.vs_weight_w1 = 1.0;
    CHECK(compute_fitness(vs, 0.2, 0.1) == doctest::Approx(0.2));
    vs.vs_weight_w1 = 0.0;
    CHECK(compute_fitness(vs, 0.2, 0.1) == doctest::Approx(0.1));

    // every non-vs kind passes the fitness-set error straight through
    for (const char* name : {"bw", "rst-1-1", "ri", "rst-r", "vrst-1-1", "vri", "vrst-r"})
        CHECK(compute_fitness(StrategySpec::parse(name), 0.33, 0.7) == 0.33);
}

TEST_CASE("model selection keys on the held-out error except for vs") {
    StrategySpec vs = StrategySpec::parse("vs");
    CHECK(selection_error(vs, 0.42, 0.1) == 0.42);  // composite fitness
    for (const char* name : {"std", "bw", "rst-1-1", "ri", "rst-r", "vrst-1-1", "vri", "vrst-r"})
        CHECK(selection_error(StrategySpec::parse(name), 0.42, 0.1) == 0.1);
}

} // TEST_SUITE
