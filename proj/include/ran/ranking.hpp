#pragma once

#include "ran/affinity.hpp"
#include "ran/types.hpp"

#include <optional>
#include <vector>

namespace ran {

// Binary query indicator with at least one query.
class QueryVector {
public:
    static QueryVector from_indices(Index n, const std::vector<Index>& queries);
    // Every entry must be exactly 0 or 1.
    static QueryVector from_indicator(const Vector& y);

    const Vector& values() const { return y_; }
    Index size() const { return y_.size(); }
    bool is_query(Index i) const { return y_[i] != 0.0; }
    std::vector<Index> indices() const;

private:
    explicit QueryVector(Vector y) : y_(std::move(y)) {}
    Vector y_;
};

struct RankConfig {
    Index k = 5;
    double lambda = 1.0;
    // Finite stand-in for an infinite fidelity weight on the queries.
    double query_weight = 1e8;
    int max_iters = 50;
    double tol = 1e-6;
    // Freezes gamma_i to this value for every row and iteration.
    std::optional<double> gamma_override;
};

// Throws std::invalid_argument if cfg is unusable for n points.
void validate_config(const RankConfig& cfg, Index n);

struct RankResult {
    Vector scores;
    SparseAffinity affinity;
    GammaResult gamma;
    int iterations = 0;
    std::vector<double> objective_trace;
    bool converged = false;
    // Relative residual of the last score solve.
    double residual = 0.0;
};

// Solves (2 lambda L + U) f = U y, U_ii = query_weight on queries and 1
// elsewhere. Throws SolverError if the relative residual exceeds 1e-8.
Vector solve_scores(const SparseMatrix& laplacian, const QueryVector& y, double lambda,
                    double query_weight);

// sum_ij (d^x_ij s_ij + gamma_i s_ij^2) + 2 lambda f'Lf + (f - y)'U(f - y)
double objective_value(const Eigen::MatrixXd& sq_dists, const SparseAffinity& s,
                       const Vector& scores, const QueryVector& y, const RankConfig& cfg,
                       const GammaResult& gamma);
double objective_value(const DataMatrix& data, const SparseAffinity& s, const Vector& scores,
                       const QueryVector& y, const RankConfig& cfg, const GammaResult& gamma);

// Alternates the score solve with the neighbor reassignment until the
// relative change of the scores drops below cfg.tol.
RankResult ran_solve(const DataMatrix& data, const QueryVector& y, const RankConfig& cfg);
// Same, reusing precomputed squared distances.
RankResult ran_solve(const Eigen::MatrixXd& sq_dists, const QueryVector& y, const RankConfig& cfg);

// Indices not in `exclude`, by descending score, ties to the lower index.
std::vector<Index> rank_order(const Vector& scores, const std::vector<Index>& exclude = {});

}  // namespace ran
