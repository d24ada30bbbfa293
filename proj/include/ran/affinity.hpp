#pragma once

#include "ran/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ran {

// Squared Euclidean distances between all rows. Exactly symmetric with a zero
// diagonal: each pair is computed once by direct differencing, never through
// the |a|^2 + |b|^2 - 2ab expansion, so near-duplicate points keep their
// small distances.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pairwise_sq_dists(const Eigen::MatrixBase<Derived>& data) {
    using Scalar = typename Derived::Scalar;
    const Index n = data.rows();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const Scalar v = (data.row(i) - data.row(j)).squaredNorm();
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

// Row-stochastic neighbor weights; row i holds the learned s_i.
struct SparseAffinity {
    SparseRowMatrix weights;
    Index k = 0;

    Index size() const { return weights.rows(); }
};

struct GammaResult {
    Vector per_row;
    double mean = 0.0;
};

struct NeighborRow {
    std::vector<std::pair<Index, double>> entries;  // ascending distance order
    double gamma = 0.0;                             // regularization used for this row
};

// gamma_i for a row whose candidate distances are already sorted ascending:
// (k/2) d_(k+1) - (1/2) sum_{j<=k} d_(j). The largest value that still keeps
// d_(k+1) out of the support.
double row_gamma(const std::vector<double>& sorted_candidates, Index k);

// Solves min ||s + d/(2 gamma)||^2 over the probability simplex for one row.
//
// `self` (if set) is excluded from the candidates and gets weight 0. Candidates
// are ordered by distance with ties going to the lower index.
//
// With gamma unset ("auto") gamma is chosen per row so the support is exactly
// the k nearest candidates, and the weights come from the closed form
//   s_j = max(eta - d_j / (2 gamma), 0),  eta = 1/k + sum_{j<=k} d_j / (2 k gamma).
// If the k+1 nearest distances are all equal, gamma is 0 and the k nearest get
// 1/k each. If there are only k candidates there is no (k+1)-th distance to
// bound gamma; they get 1/k each and gamma is reported as 0.
//
// With a fixed gamma the support is limited to the k nearest candidates and
// the weights are the simplex projection of -d/(2 gamma) on that support,
// which is the exact minimizer under the at-most-k-nonzeros constraint.
NeighborRow assign_neighbors_row(const Eigen::Ref<const Vector>& distances,
                                 std::optional<Index> self, Index k,
                                 std::optional<double> gamma = std::nullopt);

struct AffinityResult {
    SparseAffinity affinity;
    GammaResult gamma;
};

// Builds every row from d_ij = sq_dists(i, j) + lambda (f_i - f_j)^2.
AffinityResult assign_all_neighbors(const Eigen::MatrixXd& sq_dists, const Vector& scores,
                                    double lambda, Index k,
                                    std::optional<double> gamma = std::nullopt);

// Initialization variant: scores absent, the lambda term is dropped.
AffinityResult assign_all_neighbors(const Eigen::MatrixXd& sq_dists, Index k,
                                    std::optional<double> gamma = std::nullopt);

// From raw points; squared distances are computed internally.
AffinityResult assign_all_neighbors(const DataMatrix& data, const std::optional<Vector>& scores,
                                    double lambda, Index k);
inline AffinityResult assign_all_neighbors(const DataMatrix& data, const Vector& scores, double lambda,
                                           Index k) {
    return assign_all_neighbors(data, std::optional<Vector>(scores), lambda, k);
}

// L = D - (S^T + S)/2, D_ii = sum_j (s_ij + s_ji)/2.
SparseMatrix laplacian(const SparseRowMatrix& weights);
inline SparseMatrix laplacian(const SparseAffinity& s) { return laplacian(s.weights); }

// Per-row gamma from feature distances alone, plus their mean.
GammaResult compute_gamma(const DataMatrix& data, Index k);
GammaResult compute_gamma_from_dists(const Eigen::MatrixXd& sq_dists, Index k);

// "i,j,weight" lines, row-major order, no header.
std::string to_triplet_csv(const SparseAffinity& s);
void save_triplet_csv(const SparseAffinity& s, const std::filesystem::path& path);

}  // namespace ran
