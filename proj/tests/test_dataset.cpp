#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "gesr/dataset.hpp"
#include "gesr/rng.hpp"

using namespace gesr;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    fs::path p = fs::temp_directory_path() / "gesr_dataset_tests";
    fs::create_directories(p);
    return p;
}

std::string write_fixture(const std::string& name, const std::string& content) {
    fs::path p = tmp_dir() / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    return p.string();
}

double radius(std::span<const double> row) {
    return std::sqrt(row[0] * row[0] + row[1] * row[1]);
}

int count_class(const Dataset& ds, double cls) {
    return static_cast<int>(std::count(ds.targets.begin(), ds.targets.end(), cls));
}

const std::string kForestFiresHeader =
    "X,Y,month,day,FFMC,DMC,DC,ISI,temp,RH,wind,rain,area\n";
const std::string kForestFiresRows =
    "7,5,mar,fri,86.2,26.2,94.3,5.1,8.2,51,6.7,0.0,0.0\n"
    "7,4,oct,tue,90.6,35.4,669.1,6.7,18.0,33,0.9,0.0,0.36\n";

// 32 comma-separated fields: id, diagnosis, then 30 measurements (here 1..30
// and 101..130 so rows are easy to tell apart).
std::string wdbc_row(const std::string& id, const std::string& diagnosis, double base) {
    std::string row = id + "," + diagnosis;
    for (int i = 1; i <= 30; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), ",%g", base + i);
        row += buf;
    }
    return row + "\n";
}

} // namespace

TEST_SUITE("dataset") {

TEST_CASE("sphere target is the squared radius plus noise") {
    Rng rng(1);
    // degenerate ranges pin every draw
    Dataset flat = gen_sphere(5, 30, {1.5, 1.5}, {0.0, 0.0}, rng);
    CHECK(flat.task == Task::regression);
    CHECK(flat.n_rows() == 5);
    CHECK(flat.n_features == 30);
    for (int i = 0; i < flat.n_rows(); ++i) {
        for (double v : flat.row(i)) CHECK(v == 1.5);
        CHECK(flat.targets[static_cast<std::size_t>(i)] == doctest::Approx(67.5));
    }
    Dataset zero = gen_sphere(3, 2, {0.0, 0.0}, {0.0, 0.0}, rng);
    for (double t : zero.targets) CHECK(t == 0.0);

    Dataset ds = gen_sphere(200, 30, {-1.5, 1.5}, {-6.0, 6.0}, rng);
    CHECK_NOTHROW(ds.validate());
    for (int i = 0; i < ds.n_rows(); ++i) {
        double sum = 0.0;
        for (double v : ds.row(i)) {
            CHECK(v >= -1.5);
            CHECK(v <= 1.5);
            sum += v * v;
        }
        double noise = ds.targets[static_cast<std::size_t>(i)] - sum;
        CHECK(noise >= -6.0);
        CHECK(noise <= 6.0);
    }
    CHECK_THROWS_AS(gen_sphere(10, 2, {1.0, -1.0}, {0.0, 0.0}, rng), std::invalid_argument);
}

TEST_CASE("two spirals alternate classes along interleaved arms") {
    Rng rng(2);
    Dataset ds = gen_two_spirals(3000, 2.0, 0.1, rng);
    CHECK(ds.task == Task::classification);
    CHECK(ds.n_rows() == 3000);
    CHECK(ds.n_features == 2);
    CHECK(count_class(ds, 0.0) == 1500);
    CHECK(count_class(ds, 1.0) == 1500);
    CHECK_NOTHROW(ds.validate());

    // with no positional noise every point sits inside the unit disc
    Dataset clean = gen_two_spirals(500, 2.0, 0.0, rng);
    for (int i = 0; i < clean.n_rows(); ++i) CHECK(radius(clean.row(i)) <= 1.0 + 1e-12);
}

TEST_CASE("cluster-in-cluster separates blob and ring") {
    Rng rng(3);
    Dataset ds = gen_cluster_in_cluster(1240, 0.5, 2.5, rng);
    CHECK(ds.n_rows() == 1240);
    CHECK(count_class(ds, 0.0) == 620);
    CHECK(count_class(ds, 1.0) == 620);
    for (int i = 0; i < ds.n_rows(); ++i) {
        double r = radius(ds.row(i));
        if (ds.targets[static_cast<std::size_t>(i)] == 1.0) {
            CHECK(r >= 2.0 - 1e-12);
            CHECK(r <= 3.0 + 1e-12);
        }
    }
    // inner radius zero puts the blob at the origin and the ring at exactly 2.5
    Dataset crisp = gen_cluster_in_cluster(10, 0.0, 2.5, rng);
    for (int i = 0; i < crisp.n_rows(); ++i) {
        double r = radius(crisp.row(i));
        if (crisp.targets[static_cast<std::size_t>(i)] == 0.0)
            CHECK(r == 0.0);
        else
            CHECK(r == doctest::Approx(2.5));
    }
    CHECK_THROWS_AS(gen_cluster_in_cluster(10, 2.5, 0.5, rng), std::invalid_argument);
}

TEST_CASE("half-kernel arcs sit on the non-negative-x half plane") {
    Rng rng(4);
    Dataset ds = gen_halfkernel(1200, {1.0, 2.0}, rng);
    CHECK(ds.n_rows() == 1200);
    CHECK(count_class(ds, 0.0) == 600);
    CHECK(count_class(ds, 1.0) == 600);
    // noise sd is 0.1, so radii hug the arcs (8 sd of slack, deterministic seed)
    for (int i = 0; i < ds.n_rows(); ++i) {
        double r = radius(ds.row(i));
        double want = ds.targets[static_cast<std::size_t>(i)] == 0.0 ? 1.0 : 2.0;
        CHECK(std::fabs(r - want) < 0.8);
        CHECK(ds.row(i)[0] > -0.8);
    }
    CHECK_THROWS_AS(gen_halfkernel(10, {1.0, 1.0}, rng), std::invalid_argument);
}

TEST_CASE("train/test splits partition the rows deterministically") {
    Rng rng(5);
    Dataset ds = gen_sphere(1000, 2, {-1, 1}, {0, 0}, rng);
    auto [trn, tst] = split_trn_tst(ds, {0.7, 0, 9});
    CHECK(trn.size() == 700);
    CHECK(tst.size() == 300);
    CHECK(std::is_sorted(trn.begin(), trn.end()));
    CHECK(std::is_sorted(tst.begin(), tst.end()));
    std::set<int> all(trn.begin(), trn.end());
    all.insert(tst.begin(), tst.end());
    CHECK(all.size() == 1000);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 999);

    auto [trn2, tst2] = split_trn_tst(ds, {0.7, 0, 9});
    CHECK(trn2 == trn);
    auto [trn3, tst3] = split_trn_tst(ds, {0.7, 1, 9});
    CHECK(trn3 != trn);
    auto [trn4, tst4] = split_trn_tst(ds, {0.7, 0, 10});
    CHECK(trn4 != trn);

    // round-to-nearest on the boundary and empty-side rejection
    Dataset tiny = gen_sphere(5, 2, {-1, 1}, {0, 0}, rng);
    auto [t5, s5] = split_trn_tst(tiny, {0.5, 0, 1});
    CHECK(t5.size() == 3);
    CHECK(s5.size() == 2);
    CHECK_THROWS_AS(split_trn_tst(tiny, {0.99, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(split_trn_tst(tiny, {0.01, 0, 1}), std::invalid_argument);
}

TEST_CASE("forest fires loader encodes month and day names") {
    std::string path = write_fixture("ff_ok.csv", kForestFiresHeader + kForestFiresRows);
    Dataset ds = load_forest_fires(path);
    CHECK(ds.task == Task::regression);
    CHECK(ds.n_rows() == 2);
    CHECK(ds.n_features == 12);
    CHECK(ds.feature_names[2] == "month");
    CHECK(ds.row(0)[2] == 3.0);   // mar
    CHECK(ds.row(0)[3] == 5.0);   // fri
    CHECK(ds.row(1)[2] == 10.0);  // oct
    CHECK(ds.row(1)[3] == 2.0);   // tue
    CHECK(ds.targets[0] == 0.0);
    CHECK(ds.targets[1] == 0.36);
    CHECK_NOTHROW(ds.validate());

    // same rows without a header load identically (first field is numeric)
    std::string headerless = write_fixture("ff_nohdr.csv", kForestFiresRows);
    Dataset ds2 = load_forest_fires(headerless);
    CHECK(ds2.n_rows() == 2);
    CHECK(ds2.values == ds.values);

    // month/day tokens are case-insensitive
    std::string mixed = write_fixture(
        "ff_case.csv", "7,5,MAR,Fri,86.2,26.2,94.3,5.1,8.2,51,6.7,0.0,0.0\n");
    CHECK(load_forest_fires(mixed).row(0)[2] == 3.0);
}

TEST_CASE("forest fires loader reports the offending cell") {
    std::string bad_month = write_fixture(
        "ff_badmonth.csv",
        kForestFiresHeader + kForestFiresRows.substr(0, kForestFiresRows.find('\n') + 1) +
            "7,4,smarch,tue,90.6,35.4,669.1,6.7,18.0,33,0.9,0.0,0.36\n");
    try {
        load_forest_fires(bad_month);
        FAIL("expected a loader error");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("column 3") != std::string::npos);
        CHECK(msg.find("smarch") != std::string::npos);
    }

    std::string short_row = write_fixture("ff_short.csv", "7,5,mar,fri,86.2\n");
    CHECK_THROWS_WITH_AS(load_forest_fires(short_row),
                         doctest::Contains("line 1"), std::runtime_error);
    std::string bad_number = write_fixture(
        "ff_badnum.csv", "7,xx,mar,fri,86.2,26.2,94.3,5.1,8.2,51,6.7,0.0,0.0\n");
    CHECK_THROWS_WITH_AS(load_forest_fires(bad_number),
                         doctest::Contains("column 2"), std::runtime_error);
    CHECK_THROWS_AS(load_forest_fires((tmp_dir() / "missing.csv").string()),
                    std::runtime_error);
}

TEST_CASE("breast cancer loader maps diagnoses and drops the id") {
    std::string path = write_fixture("wdbc_ok.data",
                                     wdbc_row("8510426", "M", 0.0) + wdbc_row("8510653", "B", 100.0));
    Dataset ds = load_wdbc(path);
    CHECK(ds.task == Task::classification);
    CHECK(ds.n_rows() == 2);
    CHECK(ds.n_features == 30);
    CHECK(ds.targets[0] == 1.0);  // malignant
    CHECK(ds.targets[1] == 0.0);  // benign
    CHECK(ds.row(0)[0] == 1.0);   // id column gone, measurements start at 1
    CHECK(ds.row(1)[29] == 130.0);
    CHECK_NOTHROW(ds.validate());

    // header detection keys on the diagnosis column
    std::string with_header = write_fixture(
        "wdbc_hdr.data", "id,diagnosis,rest\n" + wdbc_row("1", "b", 0.0));
    CHECK(load_wdbc(with_header).targets[0] == 0.0);

    std::string bad_diag = write_fixture("wdbc_bad.data", wdbc_row("1", "M", 0.0)
                                                              + wdbc_row("2", "Q", 0.0));
    CHECK_THROWS_WITH_AS(load_wdbc(bad_diag), doctest::Contains("line 2"), std::runtime_error);
    std::string short_row = write_fixture("wdbc_short.data", "1,M,2.0\n");
    CHECK_THROWS_AS(load_wdbc(short_row), std::runtime_error);
}

TEST_CASE("CSV round-trip preserves every value bit for bit") {
    Rng rng(6);
    Dataset ds = gen_sphere(50, 3, {-1.5, 1.5}, {-6, 6}, rng);
    std::string path = (tmp_dir() / "roundtrip.csv").string();
    write_csv(ds, path);
    Dataset back = load_dataset_csv(path, "sph", Task::regression);
    CHECK(back.values == ds.values);
    CHECK(back.targets == ds.targets);
    CHECK(back.n_features == 3);
    CHECK(back.task == Task::regression);

    Rng rng2(7);
    Dataset cls = gen_halfkernel(40, {1.0, 2.0}, rng2);
    std::string cpath = (tmp_dir() / "roundtrip_cls.csv").string();
    write_csv(cls, cpath);
    Dataset cback = load_dataset_csv(cpath, "hk", Task::classification);
    CHECK(cback.values == cls.values);
    CHECK(cback.targets == cls.targets);
}

TEST_CASE("registry builds every synthetic set at its published size") {
    CHECK(dataset_names()
          == std::vector<std::string>{"ts", "cic", "hk", "sph", "ff", "wdbc"});
    CHECK(is_synthetic_dataset("ts"));
    CHECK(is_synthetic_dataset("sph"));
    CHECK_FALSE(is_synthetic_dataset("ff"));
    CHECK_FALSE(is_synthetic_dataset("wdbc"));

    Dataset ts = make_dataset("ts", 11, "");
    CHECK(ts.n_rows() == 3000);
    CHECK(ts.n_features == 2);
    CHECK(ts.task == Task::classification);
    Dataset cic = make_dataset("cic", 11, "");
    CHECK(cic.n_rows() == 1240);
    Dataset hk = make_dataset("hk", 11, "");
    CHECK(hk.n_rows() == 1200);
    Dataset sph = make_dataset("sph", 11, "");
    CHECK(sph.n_rows() == 1500);
    CHECK(sph.n_features == 30);
    CHECK(sph.task == Task::regression);

    // same base seed, same bits; the seed is name-specific
    Dataset ts_again = make_dataset("ts", 11, "");
    CHECK(ts_again.values == ts.values);
    Dataset ts_other = make_dataset("ts", 12, "");
    CHECK(ts_other.values != ts.values);

    CHECK_THROWS_AS(make_dataset("nope", 1, ""), std::invalid_argument);
    CHECK_THROWS_WITH_AS(make_dataset("ff", 1, (tmp_dir() / "nowhere").string()),
                         doctest::Contains("forestfires.csv"), std::runtime_error);
    CHECK_THROWS_WITH_AS(make_dataset("wdbc", 1, (tmp_dir() / "nowhere").string()),
                         doctest::Contains("wdbc.data"), std::runtime_error);
}

TEST_CASE("dataset validation rejects malformed contents") {
    Dataset ds;
    ds.name = "bad";
    ds.task = Task::classification;
    ds.n_features = 1;
    ds.feature_names = {"feature_1"};
    ds.values = {1.0, 2.0};
    ds.targets = {0.0, 1.0};
    CHECK_NOTHROW(ds.validate());

    Dataset nan_feature = ds;
    nan_feature.values[0] = std::nan("");
    CHECK_THROWS_AS(nan_feature.validate(), std::invalid_argument);

    Dataset bad_target = ds;
    bad_target.targets[1] = 2.0;
    CHECK_THROWS_AS(bad_target.validate(), std::invalid_argument);

    Dataset bad_shape = ds;
    bad_shape.values.pop_back();
    CHECK_THROWS_AS(bad_shape.validate(), std::invalid_argument);

    Dataset bad_names = ds;
    bad_names.feature_names.clear();
    CHECK_THROWS_AS(bad_names.validate(), std::invalid_argument);
}

} // TEST_SUITE
