#include "cli.hpp"

#include "ran/affinity.hpp"
#include "ran/baselines.hpp"
#include "ran/dataset.hpp"
#include "ran/eval.hpp"
#include "ran/io.hpp"
#include "ran/ranking.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace ran::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

fs::path sibling(const fs::path& out, const std::string& suffix) {
    return out.parent_path() / (out.stem().string() + suffix);
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

struct DataOptions {
    std::string path;
    std::string label_column = "last";
    std::string normalize = "none";
    long per_class = 0;
    std::uint64_t subset_seed = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--data", path, "Input CSV (comma-separated, no header)")->required();
        cmd->add_option("--label-column", label_column,
                        "Label column: 0-based index, 'last', or 'none'")
            ->capture_default_str();
        cmd->add_option("--normalize", normalize, "none | zscore_per_point | zscore_per_feature")
            ->capture_default_str();
        cmd->add_option("--per-class", per_class, "Keep this many points per class (0 = all)")
            ->capture_default_str();
        cmd->add_option("--subset-seed", subset_seed, "Seed for --per-class selection")->capture_default_str();
    }

    json to_json() const {
        return {{"path", path},
                {"label_column", label_column},
                {"normalize", normalize},
                {"per_class", per_class},
                {"subset_seed", subset_seed}};
    }

    LabeledDataset load() const {
        if (!fs::is_regular_file(path)) {
            throw UsageError("data file not found: " + path);
        }
        const std::string text = read_text_file(path);
        std::optional<Index> column;
        if (label_column == "last") {
            column = parse_csv(text).dim() - 1;
        } else if (label_column != "none") {
            try {
                column = std::stol(label_column);
            } catch (const std::exception&) {
                throw UsageError("--label-column must be an index, 'last' or 'none'");
            }
        }
        LabeledDataset ds = parse_csv(text, column);
        NormalizeResult norm = ran::normalize(ds.data, parse_normalize_mode(normalize));
        if (norm.warning()) {
            std::cerr << "warning: " << norm.zero_variance.size()
                      << " zero-variance vectors were centered but not scaled\n";
        }
        ds.data = std::move(norm.data);
        if (per_class > 0) ds = class_balanced_subset(ds, per_class, subset_seed);
        return ds;
    }
};

struct MethodOptions {
    std::string method = "ran";
    RankConfig rank;
    double gamma = 0.0;
    KernelGraphConfig kernel;
    double sigma = 0.0;
    long k_sparsify = 0;

    // `methods` lists the accepted --method values; empty means the command
    // always runs the adaptive-neighbor ranking and takes its own --k.
    void add_to(CLI::App* cmd, const std::string& methods) {
        if (!methods.empty()) {
            cmd->add_option("--method", method, methods)->capture_default_str();
            cmd->add_option("--k", rank.k, "Neighbors per point")->capture_default_str();
        }
        cmd->add_option("--lambda", rank.lambda, "Smoothness weight")->capture_default_str();
        cmd->add_option("--query-weight", rank.query_weight, "Fidelity weight on queries")->capture_default_str();
        cmd->add_option("--tol", rank.tol, "Relative score change to stop at")->capture_default_str();
        cmd->add_option("--max-iters", rank.max_iters, "Iteration cap")->capture_default_str();
        cmd->add_option("--gamma", gamma, "Fixed gamma for every row (0 = per-row auto)")->capture_default_str();
        if (methods.empty()) return;
        cmd->add_option("--sigma", sigma, "Kernel bandwidth for mr (0 = median distance)")->capture_default_str();
        cmd->add_option("--alpha", kernel.alpha, "Damping for mr")->capture_default_str();
        cmd->add_option("--k-sparsify", k_sparsify, "k-NN sparsification for mr (0 = dense)")
            ->capture_default_str();
    }

    void resolve() {
        if (gamma < 0.0) throw UsageError("--gamma must be nonnegative");
        if (sigma < 0.0) throw UsageError("--sigma must be nonnegative");
        if (k_sparsify < 0) throw UsageError("--k-sparsify must be nonnegative");
        rank.gamma_override = gamma > 0.0 ? std::optional<double>(gamma) : std::nullopt;
        kernel.sigma = sigma > 0.0 ? std::optional<double>(sigma) : std::nullopt;
        kernel.k_sparsify = k_sparsify > 0 ? std::optional<Index>(k_sparsify) : std::nullopt;
    }

    json to_json() const {
        json j = {{"method", method}};
        if (method == "ran") j["rank"] = ran::to_json(rank);
        if (method == "mr") j["kernel"] = ran::to_json(kernel);
        return j;
    }
};

int cmd_synth(const std::string& kind, long n, double noise, std::uint64_t seed,
              const std::vector<double>& radii, const std::string& out) {
    LabeledDataset ds;
    json cfg = {{"command", "synth"}, {"kind", kind}, {"n", n}, {"noise", noise}, {"seed", seed}};
    if (kind == "two_moons") {
        ds = gen_two_moons(n, noise, seed);
    } else if (kind == "three_rings") {
        if (radii.size() != 3) throw UsageError("--radii needs exactly three values");
        ds = gen_three_rings(n, {radii[0], radii[1], radii[2]}, noise, seed);
        cfg["radii"] = radii;
    } else {
        throw UsageError("unknown dataset kind '" + kind + "' (two_moons | three_rings)");
    }
    cfg["out"] = out;
    save_csv(ds, out);
    write_json(sibling(out, ".config.json"), cfg);
    return 0;
}

int cmd_rank(const DataOptions& data_opts, MethodOptions opts, const std::vector<long>& queries,
             const std::string& out, const std::string& affinity_out) {
    opts.resolve();
    const LabeledDataset ds = data_opts.load();
    const std::vector<Index> q(queries.begin(), queries.end());
    const QueryVector y = QueryVector::from_indices(ds.size(), q);

    json result;
    Vector scores;
    if (opts.method == "ran") {
        const RankResult r = ran_solve(ds.data, y, opts.rank);
        result = to_json(r);
        scores = r.scores;
        if (!affinity_out.empty()) save_triplet_csv(r.affinity, affinity_out);
    } else if (opts.method == "euclidean") {
        scores = euclidean_rank(ds.data, y);
        result["scores"] = std::vector<double>(scores.data(), scores.data() + scores.size());
    } else if (opts.method == "mr") {
        scores = manifold_rank(ds.data, y, opts.kernel);
        result["scores"] = std::vector<double>(scores.data(), scores.data() + scores.size());
    } else {
        throw UsageError("unknown method '" + opts.method + "' (ran | euclidean | mr)");
    }
    result["method"] = opts.method;
    result["queries"] = queries;
    write_json(out, result);

    std::string csv = "index";
    for (Index c = 0; c < ds.dim(); ++c) csv += ",x" + std::to_string(c);
    csv += ",score\n";
    for (Index i = 0; i < ds.size(); ++i) {
        csv += std::to_string(i);
        for (Index c = 0; c < ds.dim(); ++c) csv += "," + format_double(ds.data(i, c));
        csv += "," + format_double(scores[i]) + "\n";
    }
    write_text_file(sibling(out, ".scores.csv"), csv);

    json cfg = {{"command", "rank"}, {"data", data_opts.to_json()}, {"queries", queries}, {"out", out}};
    cfg.update(opts.to_json());
    write_json(sibling(out, ".config.json"), cfg);
    return 0;
}

int cmd_eval(const DataOptions& data_opts, MethodOptions opts, long at_k, const std::string& scores_dir,
             unsigned threads, const std::string& out) {
    opts.resolve();
    const LabeledDataset ds = data_opts.load();
    RankingMethod method;
    if (opts.method == "ran") {
        method = make_ran_method(ds, opts.rank);
    } else if (opts.method == "euclidean") {
        method = make_euclidean_method(ds);
    } else if (opts.method == "mr") {
        method = make_manifold_method(ds, opts.kernel);
    } else if (opts.method == "external") {
        if (scores_dir.empty()) throw UsageError("--method external needs --scores-dir");
        const Index n = ds.size();
        method = [dir = fs::path(scores_dir), n](const QueryVector& y) {
            return load_score_file(dir / (std::to_string(y.indices().front()) + ".csv"), n);
        };
    } else {
        throw UsageError("unknown method '" + opts.method + "' (ran | euclidean | mr | external)");
    }

    json cfg = {{"command", "eval"}, {"data", data_opts.to_json()}, {"at_k", at_k}, {"out", out}};
    cfg.update(opts.to_json());
    if (opts.method == "external") cfg["scores_dir"] = scores_dir;

    const EvalReport report = evaluate_method(ds, method, at_k, opts.method, cfg, threads);
    write_json(out, to_json(report));
    write_text_file(sibling(out, ".summary.csv"), summary_csv(report));
    write_json(sibling(out, ".config.json"), cfg);
    std::cout << summary_csv(report);
    return 0;
}

int cmd_sweep(const DataOptions& data_opts, MethodOptions opts, const std::vector<long>& k_values, long at_k,
              unsigned threads, const std::string& out) {
    if (k_values.empty()) throw UsageError("--k needs at least one value");
    opts.resolve();
    const LabeledDataset ds = data_opts.load();
    const std::vector<Index> ks(k_values.begin(), k_values.end());
    const auto sweep = sweep_k(ds, ks, opts.rank, at_k, threads);

    write_text_file(out, sweep_csv(sweep));
    json reports = json::array();
    for (const auto& [k, report] : sweep) reports.push_back(to_json(report));
    write_json(sibling(out, ".reports.json"), reports);

    json cfg = {{"command", "sweep"}, {"data", data_opts.to_json()}, {"k", k_values}, {"at_k", at_k}, {"out", out}};
    cfg.update(opts.to_json());
    cfg["rank"].erase("k");
    write_json(sibling(out, ".config.json"), cfg);
    std::cout << sweep_csv(sweep);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Ranking with adaptive neighbors: synthetic data, ranking, baselines and retrieval evaluation"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset as CSV");
    std::string kind;
    long synth_n = 100;
    double noise = 0.1;
    std::uint64_t seed = 0;
    std::vector<double> radii{1.0, 2.0, 3.0};
    std::string synth_out;
    synth->add_option("kind", kind, "two_moons | three_rings")->required();
    synth->add_option("--n", synth_n, "Points per moon or ring")->capture_default_str();
    synth->add_option("--noise", noise, "Gaussian noise standard deviation")->capture_default_str();
    synth->add_option("--seed", seed, "Random seed")->capture_default_str();
    synth->add_option("--radii", radii, "Ring radii, comma separated")->delimiter(',')->expected(3);
    synth->add_option("--out", synth_out, "Output CSV")->required();

    // rank
    auto* rank = app.add_subcommand("rank", "Score every point against the given queries");
    DataOptions rank_data;
    MethodOptions rank_opts;
    std::vector<long> queries;
    std::string rank_out;
    std::string affinity_out;
    rank_data.add_to(rank);
    rank_opts.add_to(rank, "ran | euclidean | mr");
    rank->add_option("--query", queries, "Query indices, comma separated")->delimiter(',')->required();
    rank->add_option("--out", rank_out, "Output JSON")->required();
    rank->add_option("--affinity-out", affinity_out, "Write the learned affinity as i,j,weight CSV");

    // eval
    auto* eval = app.add_subcommand("eval", "Leave-one-query-out precision/recall evaluation");
    DataOptions eval_data;
    MethodOptions eval_opts;
    long eval_at_k = 10;
    std::string scores_dir;
    unsigned eval_threads = 0;
    std::string eval_out;
    eval_data.add_to(eval);
    eval_opts.add_to(eval, "ran | euclidean | mr | external");
    eval->add_option("--at-k", eval_at_k, "Retrieval cutoff")->capture_default_str();
    eval->add_option("--scores-dir", scores_dir, "Directory of <query>.csv score files for --method external");
    eval->add_option("--threads", eval_threads, "Worker threads (0 = RAN_THREADS or hardware)");
    eval->add_option("--out", eval_out, "Output report JSON")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Evaluate the adaptive-neighbor ranking over several k");
    DataOptions sweep_data;
    MethodOptions sweep_opts;
    std::vector<long> k_values;
    long sweep_at_k = 10;
    unsigned sweep_threads = 0;
    std::string sweep_out;
    sweep_data.add_to(sweep);
    sweep_opts.add_to(sweep, "");
    sweep->add_option("--k", k_values, "Neighbor counts, comma separated")->delimiter(',')->required();
    sweep->add_option("--at-k", sweep_at_k, "Retrieval cutoff")->capture_default_str();
    sweep->add_option("--threads", sweep_threads, "Worker threads (0 = RAN_THREADS or hardware)");
    sweep->add_option("--out", sweep_out, "Output k,precision,recall CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth) return cmd_synth(kind, synth_n, noise, seed, radii, synth_out);
        if (*rank) return cmd_rank(rank_data, rank_opts, queries, rank_out, affinity_out);
        if (*eval) return cmd_eval(eval_data, eval_opts, eval_at_k, scores_dir, eval_threads, eval_out);
        if (*sweep) return cmd_sweep(sweep_data, sweep_opts, k_values, sweep_at_k, sweep_threads, sweep_out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace ran::cli
