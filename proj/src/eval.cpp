#include "ran/eval.hpp"

#include "ran/affinity.hpp"
#include "ran/io.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <thread>

namespace ran {

PrecisionRecall precision_recall_at_k(const std::vector<Index>& ranking, const std::vector<int>& labels,
                                      int query_label, Index at_k) {
    if (at_k < 1 || at_k > static_cast<Index>(ranking.size())) {
        throw std::invalid_argument("at_k = " + std::to_string(at_k) + " must be in [1, " +
                                    std::to_string(ranking.size()) + "]");
    }
    Index relevant = 0;
    Index hits = 0;
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        const Index idx = ranking[r];
        if (idx < 0 || idx >= static_cast<Index>(labels.size())) {
            throw std::invalid_argument("ranking index " + std::to_string(idx) + " has no label");
        }
        if (labels[static_cast<std::size_t>(idx)] == query_label) {
            ++relevant;
            if (static_cast<Index>(r) < at_k) ++hits;
        }
    }
    if (relevant == 0) {
        throw std::invalid_argument("no other point has label " + std::to_string(query_label) +
                                    "; recall is undefined");
    }
    return {100.0 * static_cast<double>(hits) / static_cast<double>(at_k),
            100.0 * static_cast<double>(hits) / static_cast<double>(relevant)};
}

RankingMethod make_ran_method(const LabeledDataset& ds, const RankConfig& cfg) {
    validate_dataset(ds);
    validate_config(cfg, ds.size());
    auto dists = std::make_shared<const Eigen::MatrixXd>(pairwise_sq_dists(ds.data));
    return [dists, cfg](const QueryVector& y) { return ran_solve(*dists, y, cfg).scores; };
}

RankingMethod make_euclidean_method(const LabeledDataset& ds) {
    validate_dataset(ds);
    auto data = std::make_shared<const DataMatrix>(ds.data);
    return [data](const QueryVector& y) { return euclidean_rank(*data, y); };
}

RankingMethod make_manifold_method(const LabeledDataset& ds, const KernelGraphConfig& cfg) {
    validate_dataset(ds);
    auto data = std::make_shared<const DataMatrix>(ds.data);
    return [data, cfg](const QueryVector& y) { return manifold_rank(*data, y, cfg); };
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RAN_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

EvalReport evaluate_method(const LabeledDataset& ds, const RankingMethod& method, Index at_k,
                           std::string method_name, nlohmann::json config_echo, unsigned threads) {
    validate_dataset(ds);
    const Index n = ds.size();
    std::map<int, Index> class_sizes;
    for (int label : ds.labels) ++class_sizes[label];
    for (const auto& [label, count] : class_sizes) {
        if (count < 2) {
            throw std::invalid_argument("class " + std::to_string(label) + " has fewer than 2 members");
        }
    }
    if (at_k < 1 || at_k > n - 1) {
        throw std::invalid_argument("at_k = " + std::to_string(at_k) + " must be in [1, " + std::to_string(n - 1) + "]");
    }

    std::vector<QueryOutcome> outcomes(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<Index> next{0};
    auto worker = [&] {
        for (Index q = next++; q < n; q = next++) {
            try {
                const Vector scores = method(QueryVector::from_indices(n, {q}));
                if (scores.size() != n || !scores.allFinite()) {
                    throw std::runtime_error("method returned " + std::to_string(scores.size()) +
                                             " scores or non-finite values");
                }
                const auto ranking = rank_order(scores, {q});
                const auto pr = precision_recall_at_k(ranking, ds.labels, ds.labels[static_cast<std::size_t>(q)], at_k);
                outcomes[static_cast<std::size_t>(q)] = {q, pr.precision, pr.recall};
            } catch (...) {
                errors[static_cast<std::size_t>(q)] = std::current_exception();
            }
        }
    };

    const unsigned workers = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(n));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    }

    for (Index q = 0; q < n; ++q) {
        if (errors[static_cast<std::size_t>(q)]) {
            try {
                std::rethrow_exception(errors[static_cast<std::size_t>(q)]);
            } catch (const std::exception& e) {
                throw QueryFailure(q, e.what());
            }
        }
    }

    EvalReport report;
    report.method = std::move(method_name);
    report.at_k = at_k;
    report.per_query = std::move(outcomes);
    double p = 0.0;
    double r = 0.0;
    for (const auto& o : report.per_query) {
        p += o.precision;
        r += o.recall;
    }
    report.mean_precision = p / static_cast<double>(n);
    report.mean_recall = r / static_cast<double>(n);
    report.config_echo = std::move(config_echo);
    return report;
}

std::vector<std::pair<Index, EvalReport>> sweep_k(const LabeledDataset& ds, const std::vector<Index>& k_values,
                                                  const RankConfig& base, Index at_k, unsigned threads) {
    validate_dataset(ds);
    if (k_values.empty()) {
        throw std::invalid_argument("k sweep needs at least one value");
    }
    for (Index k : k_values) {
        RankConfig cfg = base;
        cfg.k = k;
        validate_config(cfg, ds.size());
    }
    std::vector<std::pair<Index, EvalReport>> out;
    out.reserve(k_values.size());
    for (Index k : k_values) {
        RankConfig cfg = base;
        cfg.k = k;
        out.emplace_back(k, evaluate_method(ds, make_ran_method(ds, cfg), at_k, "ran", to_json(cfg), threads));
    }
    return out;
}

Vector load_score_file(const std::filesystem::path& path, Index n) {
    const LabeledDataset table = parse_csv(read_text_file(path));
    if (table.dim() != 2) {
        throw ParseError(path.string() + ": expected 2 columns (index,score)", 0, 0);
    }
    if (table.size() != n) {
        throw ParseError(path.string() + ": expected " + std::to_string(n) + " rows, found " +
                             std::to_string(table.size()),
                         0, 0);
    }
    Vector scores(n);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (Index r = 0; r < n; ++r) {
        const double idx = table.data(r, 0);
        if (idx != std::floor(idx) || idx < 0 || idx >= static_cast<double>(n) ||
            seen[static_cast<std::size_t>(idx)]) {
            throw ParseError(path.string() + ": row " + std::to_string(r + 1) + " has an invalid or repeated index",
                             static_cast<std::size_t>(r + 1), 1);
        }
        seen[static_cast<std::size_t>(idx)] = true;
        scores[static_cast<Index>(idx)] = table.data(r, 1);
    }
    return scores;
}

std::string format_percent(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json j;
    j["method"] = report.method;
    j["at_k"] = report.at_k;
    j["mean_precision"] = report.mean_precision;
    j["mean_recall"] = report.mean_recall;
    j["mean_precision_text"] = format_percent(report.mean_precision);
    j["mean_recall_text"] = format_percent(report.mean_recall);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& o : report.per_query) {
        rows.push_back({{"query", o.query}, {"precision", o.precision}, {"recall", o.recall}});
    }
    j["per_query"] = std::move(rows);
    j["config"] = report.config_echo;
    return j;
}

std::string summary_csv(const EvalReport& report) {
    return "method,at_k,mean_precision,mean_recall\n" + report.method + "," + std::to_string(report.at_k) + "," +
           format_percent(report.mean_precision) + "," + format_percent(report.mean_recall) + "\n";
}

std::string sweep_csv(const std::vector<std::pair<Index, EvalReport>>& sweep) {
    std::string out = "k,precision,recall\n";
    for (const auto& [k, report] : sweep) {
        out += std::to_string(k) + "," + format_percent(report.mean_precision) + "," +
               format_percent(report.mean_recall) + "\n";
    }
    return out;
}

}  // namespace ran
