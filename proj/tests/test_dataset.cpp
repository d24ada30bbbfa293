#include "ran/dataset.hpp"
#include "ran/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

using namespace ran;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& contents) {
    const fs::path p = fs::temp_directory_path() / ("ran_test_dataset_" + name);
    std::ofstream(p, std::ios::binary) << contents;
    return p;
}

std::map<int, int> label_counts(const LabeledDataset& ds) {
    std::map<int, int> counts;
    for (int l : ds.labels) ++counts[l];
    return counts;
}

}  // namespace

TEST_CASE("rng streams are reproducible and well scaled") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        differs = differs || x != c.uniform();
    }
    CHECK(differs);

    Rng g(1);
    double sum = 0.0, sq = 0.0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
        const double z = g.normal(0.0, 1.0);
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / m) < 0.01);
    CHECK(std::abs(sq / m - 1.0) < 0.02);
}

TEST_CASE("two moons") {
    SUBCASE("noiseless endpoints") {
        const auto ds = gen_two_moons(2, 0.0, 0);
        REQUIRE(ds.size() == 4);
        CHECK(ds.data(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(ds.data(0, 1)) < 1e-15);
        CHECK(ds.data(1, 0) == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(std::abs(ds.data(1, 1)) < 1e-15);
        CHECK(ds.labels == std::vector<int>{0, 0, 1, 1});
    }
    SUBCASE("counts with noise") {
        const auto ds = gen_two_moons(100, 0.1, 7);
        CHECK(ds.size() == 200);
        CHECK(ds.dim() == 2);
        CHECK(ds.data.allFinite());
        CHECK(label_counts(ds) == std::map<int, int>{{0, 100}, {1, 100}});
    }
    SUBCASE("noiseless points lie on the parametric curves") {
        const Index n = 50;
        const auto ds = gen_two_moons(n, 0.0, 3);
        for (Index i = 0; i < n; ++i) {
            const double t = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
            CHECK(ds.data(i, 0) == doctest::Approx(std::cos(t)).epsilon(1e-14));
            CHECK(ds.data(i, 1) == doctest::Approx(std::sin(t)).epsilon(1e-14));
            CHECK(ds.data(i, 1) >= 0.0);
            CHECK(ds.data(n + i, 0) == doctest::Approx(1.0 - std::cos(t)).epsilon(1e-14));
            CHECK(ds.data(n + i, 1) == doctest::Approx(0.5 - std::sin(t)).epsilon(1e-14));
            CHECK(ds.data(n + i, 1) <= 0.5);
        }
    }
    SUBCASE("seeded determinism") {
        const auto a = gen_two_moons(30, 0.2, 11);
        const auto b = gen_two_moons(30, 0.2, 11);
        const auto c = gen_two_moons(30, 0.2, 12);
        CHECK(a.data == b.data);
        CHECK(a.data != c.data);
    }
    SUBCASE("invalid arguments") {
        CHECK_THROWS_AS(gen_two_moons(1, 0.1, 0), std::invalid_argument);
        CHECK_THROWS_AS(gen_two_moons(10, -0.1, 0), std::invalid_argument);
    }
}

TEST_CASE("three rings") {
    SUBCASE("noiseless radius") {
        const auto ds = gen_three_rings(4, {1.0, 2.0, 3.0}, 0.0, 0);
        REQUIRE(ds.size() == 12);
        for (Index i = 0; i < 4; ++i) CHECK(ds.data.row(i).norm() == doctest::Approx(1.0).epsilon(1e-15));
        for (Index i = 8; i < 12; ++i) CHECK(ds.data.row(i).norm() == doctest::Approx(3.0).epsilon(1e-15));
    }
    SUBCASE("counts and mean norms") {
        const auto ds = gen_three_rings(60, {1.0, 2.0, 3.0}, 0.05, 1);
        CHECK(ds.size() == 180);
        CHECK(label_counts(ds) == std::map<int, int>{{0, 60}, {1, 60}, {2, 60}});
        for (int ring = 0; ring < 3; ++ring) {
            double sum = 0.0;
            for (Index i = 0; i < 60; ++i) sum += ds.data.row(ring * 60 + i).norm();
            CHECK(std::abs(sum / 60.0 - (ring + 1.0)) < 0.05);
        }
    }
    SUBCASE("radii must increase") {
        CHECK_THROWS_AS(gen_three_rings(5, {1.0, 1.0, 3.0}, 0.0, 0), std::invalid_argument);
        CHECK_THROWS_AS(gen_three_rings(5, {3.0, 2.0, 1.0}, 0.0, 0), std::invalid_argument);
        CHECK_THROWS_AS(gen_three_rings(5, {0.0, 2.0, 3.0}, 0.0, 0), std::invalid_argument);
    }
}

TEST_CASE("csv parsing") {
    SUBCASE("label column is split off") {
        const auto ds = load_csv(temp_file("basic.csv", "1,2,0\n3,4,0\n5,6,1"), Index{2});
        REQUIRE(ds.size() == 3);
        REQUIRE(ds.dim() == 2);
        CHECK(ds.data(2, 0) == 5.0);
        CHECK(ds.data(2, 1) == 6.0);
        CHECK(ds.labels == std::vector<int>{0, 0, 1});
    }
    SUBCASE("labels default to zero") {
        const auto ds = parse_csv("1,2\n3,4\n");
        CHECK(ds.dim() == 2);
        CHECK(ds.labels == std::vector<int>{0, 0});
    }
    SUBCASE("empty file") {
        CHECK_THROWS_AS(load_csv(temp_file("empty.csv", "")), ParseError);
    }
    SUBCASE("header row names row 1") {
        try {
            parse_csv("a,b,label\n1,2,0\n3,4,1\n", Index{2});
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.row() == 1);
            CHECK(e.column() == 1);
            CHECK(std::string(e.what()).find("row 1") != std::string::npos);
        }
    }
    SUBCASE("ragged rows") {
        try {
            parse_csv("1,2\n3,4,5\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.row() == 2);
        }
    }
    SUBCASE("non-numeric and non-finite cells") {
        try {
            parse_csv("1,2\n3,x\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.row() == 2);
            CHECK(e.column() == 2);
        }
        CHECK_THROWS_AS(parse_csv("1,2\nnan,4\n"), ParseError);
        CHECK_THROWS_AS(parse_csv("1,2\n3,\n"), ParseError);
    }
    SUBCASE("non-integer labels") {
        CHECK_THROWS_AS(parse_csv("1,0.5\n2,1\n", Index{1}), ParseError);
    }
}

TEST_CASE("save then load is the identity") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd(0.0, 1e3);
    std::uniform_int_distribution<int> label(-3, 9);
    for (int trial = 0; trial < 20; ++trial) {
        LabeledDataset ds;
        const Index n = 2 + trial, d = 1 + trial % 4;
        ds.data.resize(n, d);
        for (Index i = 0; i < n; ++i)
            for (Index c = 0; c < d; ++c) ds.data(i, c) = nd(gen) * std::pow(10.0, trial % 7 - 3);
        for (Index i = 0; i < n; ++i) ds.labels.push_back(label(gen));
        const auto path = fs::temp_directory_path() / "ran_test_dataset_roundtrip.csv";
        save_csv(ds, path);
        const auto back = load_csv(path, d);
        CHECK(back.data == ds.data);
        CHECK(back.labels == ds.labels);
    }
}

TEST_CASE("normalize") {
    DataMatrix x(2, 2);
    x << 1, 3, 5, 5;
    SUBCASE("per point") {
        const auto r = normalize(x, NormalizeMode::zscore_per_point);
        CHECK(r.data(0, 0) == doctest::Approx(-1.0));
        CHECK(r.data(0, 1) == doctest::Approx(1.0));
        CHECK(r.data(1, 0) == 0.0);
        CHECK(r.data(1, 1) == 0.0);
        CHECK(r.warning());
        CHECK(r.zero_variance == std::vector<Index>{1});
    }
    SUBCASE("none is the identity") {
        const auto r = normalize(x, NormalizeMode::none);
        CHECK(r.data == x);
        CHECK_FALSE(r.warning());
    }
    SUBCASE("per feature") {
        std::mt19937_64 gen(2);
        std::normal_distribution<double> nd(3.0, 2.0);
        DataMatrix y(50, 3);
        for (Index i = 0; i < y.rows(); ++i)
            for (Index c = 0; c < y.cols(); ++c) y(i, c) = nd(gen);
        const auto r = normalize(y, NormalizeMode::zscore_per_feature);
        for (Index c = 0; c < 3; ++c) {
            CHECK(std::abs(r.data.col(c).mean()) < 1e-12);
            CHECK(r.data.col(c).squaredNorm() / 50.0 == doctest::Approx(1.0));
        }
    }
    CHECK(parse_normalize_mode("zscore_per_point") == NormalizeMode::zscore_per_point);
    CHECK_THROWS_AS(parse_normalize_mode("minmax"), std::invalid_argument);
}

TEST_CASE("class balanced subset") {
    LabeledDataset ds;
    ds.data.resize(30, 1);
    for (Index i = 0; i < 30; ++i) {
        ds.data(i, 0) = static_cast<double>(i);
        ds.labels.push_back(static_cast<int>(i % 3));
    }
    const auto a = class_balanced_subset(ds, 4, 9);
    const auto b = class_balanced_subset(ds, 4, 9);
    CHECK(a.size() == 12);
    CHECK(a.data == b.data);
    CHECK(label_counts(a) == std::map<int, int>{{0, 4}, {1, 4}, {2, 4}});
    for (Index i = 1; i < a.size(); ++i) CHECK(a.data(i, 0) > a.data(i - 1, 0));
    for (Index i = 0; i < a.size(); ++i) CHECK(static_cast<int>(a.data(i, 0)) % 3 == a.labels[i]);
    CHECK_THROWS_AS(class_balanced_subset(ds, 11, 0), std::invalid_argument);
}
