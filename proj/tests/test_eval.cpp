#include "ran/eval.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace ran;
namespace fs = std::filesystem;

namespace {

LabeledDataset separated_classes(std::mt19937_64& gen, Index per_class, Index classes, Index dim, double gap) {
    std::normal_distribution<double> noise(0.0, 0.05);
    LabeledDataset ds;
    ds.data.resize(per_class * classes, dim);
    for (Index c = 0; c < classes; ++c) {
        for (Index i = 0; i < per_class; ++i) {
            const Index row = c * per_class + i;
            for (Index j = 0; j < dim; ++j) ds.data(row, j) = noise(gen) + (j == c % dim ? gap * (1 + c / dim) : 0.0);
            ds.labels.push_back(static_cast<int>(c));
        }
    }
    return ds;
}

}  // namespace

TEST_CASE("precision and recall at k") {
    std::vector<int> labels(21, 1);
    for (int i = 0; i < 11; ++i) labels[i] = 0;  // query 0 plus 10 relevant
    std::vector<Index> best, worst;
    for (Index i = 1; i <= 20; ++i) best.push_back(i);
    for (Index i = 20; i >= 1; --i) worst.push_back(i);

    auto pr = precision_recall_at_k(best, labels, 0, 10);
    CHECK(pr.precision == 100.0);
    CHECK(pr.recall == 100.0);
    pr = precision_recall_at_k(worst, labels, 0, 10);
    CHECK(pr.precision == 0.0);
    CHECK(pr.recall == 0.0);

    // Labels along the ranking: A B A A.
    const std::vector<int> abaa{0, 0, 1, 0, 0};
    pr = precision_recall_at_k({1, 2, 3, 4}, abaa, 0, 3);
    CHECK(pr.precision == doctest::Approx(200.0 / 3.0));
    CHECK(pr.recall == doctest::Approx(200.0 / 3.0));
    CHECK(format_percent(pr.precision) == "66.67");

    CHECK_THROWS_AS(precision_recall_at_k({1, 2}, {0, 1, 1}, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(precision_recall_at_k({1, 2}, {0, 0, 1}, 0, 3), std::invalid_argument);
}

TEST_CASE("recall never decreases with the cutoff and counts are whole") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 30;
        std::vector<int> labels(n);
        for (auto& l : labels) l = static_cast<int>(gen() % 3);
        labels[0] = 0;
        labels[1] = 0;
        std::vector<Index> ranking;
        for (Index i = 1; i < n; ++i) ranking.push_back(i);
        std::shuffle(ranking.begin(), ranking.end(), gen);
        Index relevant = 0;
        for (Index i : ranking) relevant += labels[i] == 0;
        double previous = 0.0;
        for (Index k = 1; k <= static_cast<Index>(ranking.size()); ++k) {
            const auto pr = precision_recall_at_k(ranking, labels, 0, k);
            CHECK(pr.recall >= previous);
            previous = pr.recall;
            const double hits = pr.precision * static_cast<double>(k) / 100.0;
            CHECK(std::abs(hits - std::round(hits)) < 1e-9);
            CHECK(std::abs(pr.recall * static_cast<double>(relevant) / 100.0 - std::round(hits)) < 1e-9);
        }
    }
}

TEST_CASE("evaluate method") {
    std::mt19937_64 gen(1);
    SUBCASE("separable classes are retrieved perfectly") {
        const auto ds = separated_classes(gen, 10, 2, 2, 10.0);
        const EvalReport r = evaluate_method(ds, make_euclidean_method(ds), 9, "euclidean");
        CHECK(r.per_query.size() == 20);
        CHECK(r.mean_precision == 100.0);
        CHECK(r.mean_recall == 100.0);
        for (Index q = 0; q < 20; ++q) CHECK(r.per_query[q].query == q);
    }
    SUBCASE("constant scores are deterministic across thread counts") {
        const auto ds = separated_classes(gen, 8, 3, 3, 1.0);
        const RankingMethod constant = [](const QueryVector& y) { return Vector::Zero(y.size()).eval(); };
        const EvalReport a = evaluate_method(ds, constant, 5, "constant", {}, 1);
        const EvalReport b = evaluate_method(ds, constant, 5, "constant", {}, 4);
        CHECK(to_json(a) == to_json(b));
        // Ties go to the lowest index, so query 23 (class 2) always sees indices 0..4 (class 0).
        CHECK(a.per_query[23].precision == 0.0);
    }
    SUBCASE("means are the averages of the rows") {
        const auto ds = gen_two_moons(20, 0.15, 4);
        const EvalReport r = evaluate_method(ds, make_euclidean_method(ds), 10, "euclidean");
        double p = 0.0, rc = 0.0;
        for (const auto& q : r.per_query) {
            CHECK(q.precision >= 0.0);
            CHECK(q.precision <= 100.0);
            CHECK(q.recall >= 0.0);
            CHECK(q.recall <= 100.0);
            p += q.precision;
            rc += q.recall;
        }
        CHECK(std::abs(r.mean_precision - p / 40.0) <= 1e-10);
        CHECK(std::abs(r.mean_recall - rc / 40.0) <= 1e-10);
    }
    SUBCASE("ten-class subset with the adaptive-neighbor ranking") {
        const auto ds = separated_classes(gen, 40, 10, 16, 3.0);
        RankConfig cfg;
        cfg.k = 10;
        cfg.lambda = 1.0;
        const EvalReport r = evaluate_method(ds, make_ran_method(ds, cfg), 50, "ran");
        CHECK(r.per_query.size() == 400);
        CHECK(r.at_k == 50);
    }
    SUBCASE("failures name the query") {
        const auto ds = separated_classes(gen, 5, 2, 2, 5.0);
        const RankingMethod failing = [](const QueryVector& y) -> Vector {
            if (y.indices().front() == 7) throw std::runtime_error("boom");
            return Vector::Zero(y.size());
        };
        try {
            evaluate_method(ds, failing, 3);
            FAIL("expected a failure");
        } catch (const QueryFailure& e) {
            CHECK(e.query() == 7);
        }
    }
    SUBCASE("validation") {
        auto ds = separated_classes(gen, 5, 2, 2, 5.0);
        CHECK_THROWS_AS(evaluate_method(ds, make_euclidean_method(ds), 10), std::invalid_argument);
        ds.labels[0] = 9;
        CHECK_THROWS_AS(evaluate_method(ds, make_euclidean_method(ds), 3), std::invalid_argument);
    }
}

TEST_CASE("sweep over k") {
    const auto ds = gen_two_moons(15, 0.1, 2);
    RankConfig base;
    const auto single = sweep_k(ds, {5}, base, 10);
    REQUIRE(single.size() == 1);
    RankConfig cfg = base;
    cfg.k = 5;
    const EvalReport direct = evaluate_method(ds, make_ran_method(ds, cfg), 10, "ran");
    CHECK(single[0].first == 5);
    CHECK(single[0].second.mean_precision == direct.mean_precision);
    CHECK(single[0].second.mean_recall == direct.mean_recall);

    const auto dup = sweep_k(ds, {3, 3}, base, 10);
    CHECK(to_json(dup[0].second) == to_json(dup[1].second));

    CHECK_THROWS_AS(sweep_k(ds, {}, base, 10), std::invalid_argument);
    CHECK_THROWS_AS(sweep_k(ds, {30}, base, 10), std::invalid_argument);

    const std::string csv = sweep_csv(dup);
    CHECK(csv.rfind("k,precision,recall\n3,", 0) == 0);
}

TEST_CASE("serialization") {
    EvalReport r;
    r.method = "ran";
    r.at_k = 50;
    r.per_query = {{0, 56.0, 70.0}, {1, 56.38, 70.46}};
    r.mean_precision = 56.19;
    r.mean_recall = 70.23;
    CHECK(summary_csv(r) == "method,at_k,mean_precision,mean_recall\nran,50,56.19,70.23\n");
    const auto j = to_json(r);
    CHECK(j["per_query"].size() == 2);
    CHECK(j["mean_precision_text"] == "56.19");
}

TEST_CASE("external score files") {
    const fs::path p = fs::temp_directory_path() / "ran_test_scores.csv";
    std::ofstream(p) << "2,0.5\n0,1\n1,-3\n";
    const Vector s = load_score_file(p, 3);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == -3.0);
    CHECK(s[2] == 0.5);
    CHECK_THROWS_AS(load_score_file(p, 4), ParseError);
    std::ofstream(p) << "0,1\n0,2\n1,3\n";
    CHECK_THROWS_AS(load_score_file(p, 3), ParseError);
}

TEST_CASE("thread count resolution") {
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
}
