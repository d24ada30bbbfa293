#pragma once

#include "ran/baselines.hpp"
#include "ran/dataset.hpp"
#include "ran/ranking.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ran {

struct PrecisionRecall {
    double precision = 0.0;  // percent
    double recall = 0.0;     // percent
};

// `ranking` lists every non-query point, best first. Recall is relative to
// the number of entries in `ranking` that carry query_label; if there are
// none, recall is undefined and std::invalid_argument is thrown.
PrecisionRecall precision_recall_at_k(const std::vector<Index>& ranking,
                                      const std::vector<int>& labels, int query_label,
                                      Index at_k);

struct QueryOutcome {
    Index query = 0;
    double precision = 0.0;
    double recall = 0.0;
};

struct EvalReport {
    std::string method;
    Index at_k = 0;
    std::vector<QueryOutcome> per_query;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    nlohmann::json config_echo = nlohmann::json::object();
};

// Scores every point for the given single-point query.
using RankingMethod = std::function<Vector(const QueryVector&)>;

RankingMethod make_ran_method(const LabeledDataset& ds, const RankConfig& cfg);
RankingMethod make_euclidean_method(const LabeledDataset& ds);
RankingMethod make_manifold_method(const LabeledDataset& ds, const KernelGraphConfig& cfg);

// Number of worker threads: `requested` if positive, otherwise RAN_THREADS if
// set and positive, otherwise the hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

class QueryFailure : public std::runtime_error {
public:
    QueryFailure(Index query, const std::string& what)
        : std::runtime_error("query " + std::to_string(query) + ": " + what), query_(query) {}
    Index query() const noexcept { return query_; }

private:
    Index query_;
};

// Uses every point once as the sole query and ranks all others. Queries may
// run in parallel; per_query is always ordered by query index. The first
// failing query (lowest index) is rethrown as QueryFailure.
EvalReport evaluate_method(const LabeledDataset& ds, const RankingMethod& method, Index at_k,
                           std::string method_name = "custom",
                           nlohmann::json config_echo = nlohmann::json::object(),
                           unsigned threads = 0);

// evaluate_method with RAN at each k, in input order.
std::vector<std::pair<Index, EvalReport>> sweep_k(const LabeledDataset& ds,
                                                  const std::vector<Index>& k_values,
                                                  const RankConfig& base, Index at_k,
                                                  unsigned threads = 0);

// "index,score" lines for one query. Every index in [0, n) must appear once.
Vector load_score_file(const std::filesystem::path& path, Index n);

nlohmann::json to_json(const EvalReport& report);
// Header line plus one row: method,at_k,mean_precision,mean_recall (2 decimals).
std::string summary_csv(const EvalReport& report);
// Header line plus k,precision,recall rows (2 decimals).
std::string sweep_csv(const std::vector<std::pair<Index, EvalReport>>& sweep);

// Percentages are reported to two decimals.
std::string format_percent(double v);

}  // namespace ran
