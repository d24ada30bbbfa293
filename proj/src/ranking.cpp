#include "ran/ranking.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ran {

QueryVector QueryVector::from_indices(Index n, const std::vector<Index>& queries) {
    if (n < 1) {
        throw std::invalid_argument("query vector length must be positive");
    }
    if (queries.empty()) {
        throw std::invalid_argument("at least one query is required");
    }
    Vector y = Vector::Zero(n);
    for (Index q : queries) {
        if (q < 0 || q >= n) {
            throw std::invalid_argument("query index " + std::to_string(q) + " out of range [0, " +
                                        std::to_string(n) + ")");
        }
        y[q] = 1.0;
    }
    return QueryVector(std::move(y));
}

QueryVector QueryVector::from_indicator(const Vector& y) {
    bool any = false;
    for (Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw std::invalid_argument("query indicator entries must be 0 or 1");
        }
        any = any || y[i] == 1.0;
    }
    if (!any) {
        throw std::invalid_argument("at least one query is required");
    }
    return QueryVector(y);
}

std::vector<Index> QueryVector::indices() const {
    std::vector<Index> out;
    for (Index i = 0; i < y_.size(); ++i) {
        if (y_[i] != 0.0) out.push_back(i);
    }
    return out;
}

void validate_config(const RankConfig& cfg, Index n) {
    if (cfg.k < 1 || cfg.k > n - 1) {
        throw std::invalid_argument("k = " + std::to_string(cfg.k) + " must be in [1, " + std::to_string(n - 1) + "]");
    }
    if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
        throw std::invalid_argument("lambda must be finite and nonnegative");
    }
    if (!(cfg.query_weight >= 1e6) || !std::isfinite(cfg.query_weight)) {
        throw std::invalid_argument("query_weight must be finite and at least 1e6");
    }
    if (cfg.max_iters < 1) {
        throw std::invalid_argument("max_iters must be positive");
    }
    if (!(cfg.tol > 0.0)) {
        throw std::invalid_argument("tol must be positive");
    }
    if (cfg.gamma_override && (!(*cfg.gamma_override > 0.0) || !std::isfinite(*cfg.gamma_override))) {
        throw std::invalid_argument("gamma override must be positive and finite");
    }
}

namespace {

constexpr double kResidualTol = 1e-8;

Vector fidelity_weights(const QueryVector& y, double query_weight) {
    Vector u(y.size());
    for (Index i = 0; i < y.size(); ++i) u[i] = y.is_query(i) ? query_weight : 1.0;
    return u;
}

struct ScoreSolve {
    Vector scores;
    double residual = 0.0;
};

ScoreSolve solve_scores_checked(const SparseMatrix& lap, const QueryVector& y, double lambda,
                                double query_weight) {
    const Index n = y.size();
    if (lap.rows() != n || lap.cols() != n) {
        throw std::invalid_argument("Laplacian size does not match query vector");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be finite and nonnegative");
    }
    if (!(query_weight > 0.0) || !std::isfinite(query_weight)) {
        throw std::invalid_argument("query_weight must be positive and finite");
    }

    const Vector u = fidelity_weights(y, query_weight);
    SparseMatrix a = (2.0 * lambda) * lap;
    // The diagonal of a Laplacian is stored for every non-isolated vertex but
    // may be absent for isolated ones, so add U through a sparse diagonal.
    SparseMatrix diag(n, n);
    diag.reserve(Eigen::VectorXi::Constant(n, 1));
    for (Index i = 0; i < n; ++i) diag.insert(i, i) = u[i];
    a += diag;
    a.makeCompressed();

    const Vector rhs = u.cwiseProduct(y.values());
    const double rhs_norm = std::max(rhs.norm(), std::numeric_limits<double>::min());

    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) {
        throw SolverError("factorization of 2*lambda*L + U failed", std::numeric_limits<double>::infinity());
    }
    Vector f = ldlt.solve(rhs);
    double residual = (a * f - rhs).norm() / rhs_norm;
    for (int refine = 0; refine < 3 && residual > kResidualTol && std::isfinite(residual); ++refine) {
        f += ldlt.solve(rhs - a * f);
        residual = (a * f - rhs).norm() / rhs_norm;
    }
    if (!(residual <= kResidualTol)) {
        throw SolverError("score solve did not reach the residual bound", residual);
    }
    return {std::move(f), residual};
}

}  // namespace

Vector solve_scores(const SparseMatrix& lap, const QueryVector& y, double lambda, double query_weight) {
    return solve_scores_checked(lap, y, lambda, query_weight).scores;
}

double objective_value(const Eigen::MatrixXd& sq_dists, const SparseAffinity& s, const Vector& scores,
                       const QueryVector& y, const RankConfig& cfg, const GammaResult& gamma) {
    const Index n = sq_dists.rows();
    if (s.size() != n || scores.size() != n || y.size() != n || gamma.per_row.size() != n) {
        throw std::invalid_argument("objective inputs have inconsistent sizes");
    }
    double neighbor_term = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (SparseRowMatrix::InnerIterator it(s.weights, i); it; ++it) {
            const double w = it.value();
            neighbor_term += sq_dists(i, it.col()) * w + gamma.per_row[i] * w * w;
        }
    }
    const SparseMatrix lap = laplacian(s);
    const double smooth = 2.0 * cfg.lambda * scores.dot(lap * scores);
    const Vector diff = scores - y.values();
    const double fidelity = fidelity_weights(y, cfg.query_weight).dot(diff.cwiseProduct(diff));
    return neighbor_term + smooth + fidelity;
}

double objective_value(const DataMatrix& data, const SparseAffinity& s, const Vector& scores,
                       const QueryVector& y, const RankConfig& cfg, const GammaResult& gamma) {
    return objective_value(pairwise_sq_dists(data), s, scores, y, cfg, gamma);
}

RankResult ran_solve(const Eigen::MatrixXd& sq_dists, const QueryVector& y, const RankConfig& cfg) {
    const Index n = sq_dists.rows();
    if (sq_dists.cols() != n || y.size() != n) {
        throw std::invalid_argument("query vector length does not match point count");
    }
    validate_config(cfg, n);

    AffinityResult current = assign_all_neighbors(sq_dists, cfg.k, cfg.gamma_override);
    RankResult result;
    Vector previous;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        ScoreSolve solved = solve_scores_checked(laplacian(current.affinity), y, cfg.lambda, cfg.query_weight);
        Vector f = std::move(solved.scores);
        result.residual = solved.residual;
        if (!f.allFinite()) {
            throw std::runtime_error("ranking scores became non-finite at iteration " + std::to_string(iter));
        }
        current = assign_all_neighbors(sq_dists, f, cfg.lambda, cfg.k, cfg.gamma_override);
        result.objective_trace.push_back(
            objective_value(sq_dists, current.affinity, f, y, cfg, current.gamma));
        result.iterations = iter;

        const bool done = iter > 1 && (f - previous).norm() / std::max(previous.norm(), 1e-12) < cfg.tol;
        previous = std::move(f);
        if (done) {
            result.converged = true;
            break;
        }
    }
    result.scores = std::move(previous);
    result.affinity = std::move(current.affinity);
    result.gamma = std::move(current.gamma);
    return result;
}

RankResult ran_solve(const DataMatrix& data, const QueryVector& y, const RankConfig& cfg) {
    validate_data(data);
    return ran_solve(pairwise_sq_dists(data), y, cfg);
}

std::vector<Index> rank_order(const Vector& scores, const std::vector<Index>& exclude) {
    const Index n = scores.size();
    std::vector<bool> skip(static_cast<std::size_t>(n), false);
    for (Index e : exclude) {
        if (e < 0 || e >= n) {
            throw std::invalid_argument("excluded index " + std::to_string(e) + " out of range");
        }
        skip[static_cast<std::size_t>(e)] = true;
    }
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        if (!skip[static_cast<std::size_t>(i)]) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace ran
