#include "gesr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gesr/util.hpp"

namespace gesr {

void Dataset::validate() const {
    if (targets.empty()) throw std::invalid_argument("dataset " + name + ": no rows");
    if (n_features < 1) throw std::invalid_argument("dataset " + name + ": no features");
    if (values.size() != targets.size() * static_cast<std::size_t>(n_features))
        throw std::invalid_argument("dataset " + name + ": value matrix size mismatch");
    if (feature_names.size() != static_cast<std::size_t>(n_features))
        throw std::invalid_argument("dataset " + name + ": feature name count mismatch");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("dataset " + name + ": non-finite feature value");
    for (double t : targets) {
        if (!std::isfinite(t))
            throw std::invalid_argument("dataset " + name + ": non-finite target");
        if (task == Task::classification && t != 0.0 && t != 1.0)
            throw std::invalid_argument("dataset " + name + ": non-binary class target");
    }
}

namespace {

std::vector<std::string> canonical_feature_names(int k) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) names.push_back("feature_" + std::to_string(i));
    return names;
}

constexpr double kTau = 2.0 * std::numbers::pi;

} // namespace

Dataset gen_sphere(int n, int n_features, std::pair<double, double> x_range,
                   std::pair<double, double> noise_range, Rng& rng) {
    if (n < 1) throw std::invalid_argument("gen_sphere: n must be >= 1");
    if (n_features < 1) throw std::invalid_argument("gen_sphere: n_features must be >= 1");
    if (x_range.first > x_range.second || noise_range.first > noise_range.second)
        throw std::invalid_argument("gen_sphere: empty range");
    Dataset ds;
    ds.name = "sph";
    ds.task = Task::regression;
    ds.n_features = n_features;
    ds.feature_names = canonical_feature_names(n_features);
    ds.values.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n_features));
    ds.targets.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n_features; ++j) {
            double x = x_range.first == x_range.second
                           ? x_range.first
                           : uniform_real(rng, x_range.first, x_range.second);
            ds.values.push_back(x);
            sum += x * x;
        }
        double noise = noise_range.first == noise_range.second
                           ? noise_range.first
                           : uniform_real(rng, noise_range.first, noise_range.second);
        ds.targets.push_back(sum + noise);
    }
    ds.validate();
    return ds;
}

Dataset gen_two_spirals(int n, double turns, double noise_sd, Rng& rng) {
    if (n < 2) throw std::invalid_argument("gen_two_spirals: n must be >= 2");
    if (turns <= 0.0) throw std::invalid_argument("gen_two_spirals: turns must be > 0");
    Dataset ds;
    ds.name = "ts";
    ds.task = Task::classification;
    ds.n_features = 2;
    ds.feature_names = canonical_feature_names(2);
    double max_angle = turns * kTau;
    for (int i = 0; i < n; ++i) {
        int cls = i % 2;
        double theta = uniform_real(rng, 0.0, max_angle);
        double r = theta / max_angle;  // radius grows linearly to 1
        double phase = theta + (cls == 1 ? std::numbers::pi : 0.0);
        double x = r * std::cos(phase) + normal_draw(rng, 0.0, noise_sd);
        double y = r * std::sin(phase) + normal_draw(rng, 0.0, noise_sd);
        ds.values.push_back(x);
        ds.values.push_back(y);
        ds.targets.push_back(static_cast<double>(cls));
    }
    ds.validate();
    return ds;
}

Dataset gen_cluster_in_cluster(int n, double inner_radius, double ring_radius, Rng& rng) {
    if (n < 2) throw std::invalid_argument("gen_cluster_in_cluster: n must be >= 2");
    if (inner_radius < 0.0 || ring_radius <= inner_radius)
        throw std::invalid_argument(
            "gen_cluster_in_cluster: need 0 <= inner_radius < ring_radius");
    Dataset ds;
    ds.name = "cic";
    ds.task = Task::classification;
    ds.n_features = 2;
    ds.feature_names = canonical_feature_names(2);
    for (int i = 0; i < n; ++i) {
        int cls = i % 2;
        double x, y;
        if (cls == 0) {
            x = normal_draw(rng, 0.0, inner_radius);
            y = normal_draw(rng, 0.0, inner_radius);
        } else {
            double theta = uniform_real(rng, 0.0, kTau);
            double r = inner_radius == 0.0
                           ? ring_radius
                           : uniform_real(rng, ring_radius - inner_radius,
                                          ring_radius + inner_radius);
            x = r * std::cos(theta);
            y = r * std::sin(theta);
        }
        ds.values.push_back(x);
        ds.values.push_back(y);
        ds.targets.push_back(static_cast<double>(cls));
    }
    ds.validate();
    return ds;
}

Dataset gen_halfkernel(int n, std::pair<double, double> arc_radii, Rng& rng) {
    if (n < 2) throw std::invalid_argument("gen_halfkernel: n must be >= 2");
    if (arc_radii.first <= 0.0 || arc_radii.second <= 0.0 ||
        arc_radii.first == arc_radii.second)
        throw std::invalid_argument("gen_halfkernel: radii must be positive and distinct");
    Dataset ds;
    ds.name = "hk";
    ds.task = Task::classification;
    ds.n_features = 2;
    ds.feature_names = canonical_feature_names(2);
    double noise_sd = 0.1 * std::fabs(arc_radii.second - arc_radii.first);
    for (int i = 0; i < n; ++i) {
        int cls = i % 2;
        double r = cls == 0 ? arc_radii.first : arc_radii.second;
        double theta = uniform_real(rng, -std::numbers::pi / 2.0, std::numbers::pi / 2.0);
        double x = r * std::cos(theta) + normal_draw(rng, 0.0, noise_sd);
        double y = r * std::sin(theta) + normal_draw(rng, 0.0, noise_sd);
        ds.values.push_back(x);
        ds.values.push_back(y);
        ds.targets.push_back(static_cast<double>(cls));
    }
    ds.validate();
    return ds;
}

namespace {

[[noreturn]] void cell_error(const std::string& path, int line, int column,
                             const std::string& what) {
    throw std::runtime_error(path + ": line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what);
}

double parse_cell(const std::string& path, int line, int column, std::string_view cell) {
    std::string buf(trim(cell));
    if (buf.empty()) cell_error(path, line, column, "empty numeric field");
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v))
        cell_error(path, line, column, "expected a number, got '" + buf + "'");
    return v;
}

bool looks_numeric(std::string_view cell) {
    std::string buf(trim(cell));
    if (buf.empty()) return false;
    char* end = nullptr;
    std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (lines.empty()) throw std::runtime_error(path + ": empty file");
    return lines;
}

int month_number(const std::string& path, int line, int column, std::string_view token) {
    static const char* names[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                  "jul", "aug", "sep", "oct", "nov", "dec"};
    std::string t = to_lower(trim(token));
    for (int i = 0; i < 12; ++i)
        if (t == names[i]) return i + 1;
    cell_error(path, line, column, "unknown month token '" + std::string(token) + "'");
}

int day_number(const std::string& path, int line, int column, std::string_view token) {
    static const char* names[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
    std::string t = to_lower(trim(token));
    for (int i = 0; i < 7; ++i)
        if (t == names[i]) return i + 1;
    cell_error(path, line, column, "unknown day token '" + std::string(token) + "'");
}

} // namespace

Dataset load_forest_fires(const std::string& path) {
    constexpr int kColumns = 13;  // 12 inputs + burned area
    auto lines = read_lines(path);
    Dataset ds;
    ds.name = "ff";
    ds.task = Task::regression;
    ds.n_features = 12;
    ds.feature_names = {"X",    "Y",   "month", "day",  "FFMC", "DMC",
                        "DC",   "ISI", "temp",  "RH",   "wind", "rain"};
    std::size_t start = 0;
    {
        auto first = split(lines[0], ',');
        if (!first.empty() && !looks_numeric(first[0])) start = 1;  // header row
    }
    for (std::size_t li = start; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        int line_no = static_cast<int>(li) + 1;
        auto cells = split(lines[li], ',');
        if (cells.size() != kColumns)
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(kColumns) +
                                     " fields, got " + std::to_string(cells.size()));
        for (int c = 0; c < kColumns - 1; ++c) {
            double v;
            if (c == 2)
                v = month_number(path, line_no, c + 1, cells[static_cast<std::size_t>(c)]);
            else if (c == 3)
                v = day_number(path, line_no, c + 1, cells[static_cast<std::size_t>(c)]);
            else
                v = parse_cell(path, line_no, c + 1, cells[static_cast<std::size_t>(c)]);
            ds.values.push_back(v);
        }
        ds.targets.push_back(parse_cell(path, line_no, kColumns, cells[kColumns - 1]));
    }
    ds.validate();
    return ds;
}

Dataset load_wdbc(const std::string& path) {
    constexpr int kColumns = 32;  // ID, diagnosis, 30 features
    auto lines = read_lines(path);
    Dataset ds;
    ds.name = "wdbc";
    ds.task = Task::classification;
    ds.n_features = 30;
    ds.feature_names = canonical_feature_names(30);
    std::size_t start = 0;
    {
        auto first = split(lines[0], ',');
        if (first.size() > 1) {
            auto diag = to_lower(trim(first[1]));
            if (diag != "m" && diag != "b") start = 1;  // header row
        }
    }
    for (std::size_t li = start; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        int line_no = static_cast<int>(li) + 1;
        auto cells = split(lines[li], ',');
        if (cells.size() != kColumns)
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(kColumns) +
                                     " fields, got " + std::to_string(cells.size()));
        auto diag = to_lower(trim(cells[1]));
        if (diag == "b")
            ds.targets.push_back(0.0);  // benign = first class
        else if (diag == "m")
            ds.targets.push_back(1.0);  // malignant = second class
        else
            cell_error(path, line_no, 2, "expected diagnosis M or B, got '" + cells[1] + "'");
        for (int c = 2; c < kColumns; ++c)
            ds.values.push_back(parse_cell(path, line_no, c + 1, cells[static_cast<std::size_t>(c)]));
    }
    ds.validate();
    return ds;
}

std::pair<std::vector<int>, std::vector<int>> split_trn_tst(const Dataset& ds,
                                                            const SplitSpec& spec) {
    if (spec.trn_fraction <= 0.0 || spec.trn_fraction >= 1.0)
        throw std::invalid_argument("split_trn_tst: trn_fraction must be in (0, 1)");
    int n = ds.n_rows();
    int n_trn = static_cast<int>(std::llround(spec.trn_fraction * n));
    if (n_trn < 1 || n_trn >= n)
        throw std::invalid_argument("split_trn_tst: fraction " +
                                    std::to_string(spec.trn_fraction) + " on " +
                                    std::to_string(n) + " rows leaves one side empty");
    Rng rng(derive_seed(spec.base_seed, {"split", ds.name, std::to_string(spec.run_index)}));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)  // Fisher-Yates, pinned independent of std::shuffle
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(uniform_int(rng, 0, i))]);
    std::vector<int> trn(order.begin(), order.begin() + n_trn);
    std::vector<int> tst(order.begin() + n_trn, order.end());
    std::sort(trn.begin(), trn.end());
    std::sort(tst.begin(), tst.end());
    return {std::move(trn), std::move(tst)};
}

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int j = 1; j <= ds.n_features; ++j) out << "feature_" << j << ",";
    out << "target\n";
    for (int i = 0; i < ds.n_rows(); ++i) {
        auto row = ds.row(i);
        for (double v : row) out << format_real(v) << ",";
        if (ds.task == Task::classification)
            out << static_cast<int>(ds.targets[static_cast<std::size_t>(i)]) << "\n";
        else
            out << format_real(ds.targets[static_cast<std::size_t>(i)]) << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

Dataset load_dataset_csv(const std::string& path, const std::string& name, Task task) {
    auto lines = read_lines(path);
    auto header = split(lines[0], ',');
    if (header.size() < 2 || to_lower(trim(header.back())) != "target")
        throw std::runtime_error(path + ": line 1: expected header ending in 'target'");
    Dataset ds;
    ds.name = name;
    ds.task = task;
    ds.n_features = static_cast<int>(header.size()) - 1;
    ds.feature_names = canonical_feature_names(ds.n_features);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        int line_no = static_cast<int>(li) + 1;
        auto cells = split(lines[li], ',');
        if (cells.size() != header.size())
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(cells.size()));
        for (std::size_t c = 0; c + 1 < cells.size(); ++c)
            ds.values.push_back(parse_cell(path, line_no, static_cast<int>(c) + 1, cells[c]));
        ds.targets.push_back(
            parse_cell(path, line_no, static_cast<int>(cells.size()), cells.back()));
    }
    ds.validate();
    return ds;
}

std::vector<std::string> dataset_names() { return {"ts", "cic", "hk", "sph", "ff", "wdbc"}; }

bool is_synthetic_dataset(const std::string& name) {
    return name == "ts" || name == "cic" || name == "hk" || name == "sph";
}

Dataset make_dataset(const std::string& name, std::uint64_t base_seed,
                     const std::string& data_dir) {
    Rng rng(derive_seed(base_seed, {"data", name}));
    if (name == "ts") return gen_two_spirals(3000, 2.0, 0.1, rng);
    if (name == "cic") return gen_cluster_in_cluster(1240, 0.5, 2.5, rng);
    if (name == "hk") return gen_halfkernel(1200, {1.0, 2.0}, rng);
    if (name == "sph") return gen_sphere(1500, 30, {-1.5, 1.5}, {-6.0, 6.0}, rng);
    if (name == "ff") return load_forest_fires(data_dir + "/forestfires.csv");
    if (name == "wdbc") return load_wdbc(data_dir + "/wdbc.data");
    throw std::invalid_argument("unknown dataset '" + name +
                                "' (expected ts, cic, hk, sph, ff or wdbc)");
}

} // namespace gesr
