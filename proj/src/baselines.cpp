#include "ran/baselines.hpp"

#include "ran/affinity.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ran {

Vector euclidean_rank(const DataMatrix& data, const QueryVector& y) {
    validate_data(data);
    if (y.size() != data.rows()) {
        throw std::invalid_argument("query vector length does not match point count");
    }
    const std::vector<Index> queries = y.indices();
    Vector scores(data.rows());
    for (Index i = 0; i < data.rows(); ++i) {
        if (y.is_query(i)) {
            scores[i] = 0.0;
            continue;
        }
        double nearest = std::numeric_limits<double>::infinity();
        for (Index q : queries) nearest = std::min(nearest, (data.row(i) - data.row(q)).norm());
        scores[i] = nearest == 0.0 ? 0.0 : -nearest;
    }
    return scores;
}

double median_pairwise_distance(const DataMatrix& data) {
    validate_data(data);
    const Index n = data.rows();
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) dists.push_back((data.row(i) - data.row(j)).norm());
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t m = dists.size();
    return m % 2 == 1 ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
}

namespace {

void validate_kernel_config(const KernelGraphConfig& cfg, Index n) {
    if (cfg.sigma && (!(*cfg.sigma > 0.0) || !std::isfinite(*cfg.sigma))) {
        throw std::invalid_argument("sigma must be positive and finite");
    }
    if (cfg.k_sparsify && (*cfg.k_sparsify < 1 || *cfg.k_sparsify > n - 1)) {
        throw std::invalid_argument("k_sparsify must be in [1, n-1]");
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie strictly between 0 and 1");
    }
}

}  // namespace

SparseMatrix normalized_kernel_graph(const DataMatrix& data, const KernelGraphConfig& cfg) {
    validate_data(data);
    const Index n = data.rows();
    validate_kernel_config(cfg, n);

    double sigma = cfg.sigma ? *cfg.sigma : median_pairwise_distance(data);
    if (!(sigma > 0.0)) sigma = 1.0;  // every point identical

    const Eigen::MatrixXd dx = pairwise_sq_dists(data);
    // std::exp rather than the vectorized array exp, which clamps large
    // negative arguments instead of underflowing to exactly zero.
    const double scale = 1.0 / (2.0 * sigma * sigma);
    Eigen::MatrixXd w = dx.unaryExpr([scale](double v) { return std::exp(-v * scale); });
    w.diagonal().setZero();

    if (cfg.k_sparsify) {
        const auto k = static_cast<std::size_t>(*cfg.k_sparsify);
        Eigen::MatrixXd kept = Eigen::MatrixXd::Zero(n, n);
        std::vector<Index> order;
        for (Index i = 0; i < n; ++i) {
            order.clear();
            for (Index j = 0; j < n; ++j) {
                if (j != i) order.push_back(j);
            }
            std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return w(i, a) > w(i, b); });
            for (std::size_t r = 0; r < k; ++r) kept(i, order[r]) = w(i, order[r]);
        }
        w = kept.cwiseMax(kept.transpose());
    }

    const Vector degree = w.rowwise().sum();
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index i = 0; i < n; ++i) {
        if (degree[i] <= 0.0) continue;
        for (Index j = 0; j < n; ++j) {
            if (w(i, j) == 0.0 || degree[j] <= 0.0) continue;
            triplets.emplace_back(i, j, w(i, j) / std::sqrt(degree[i] * degree[j]));
        }
    }
    SparseMatrix out(n, n);
    out.setFromTriplets(triplets.begin(), triplets.end());
    out.makeCompressed();
    return out;
}

Vector manifold_rank(const DataMatrix& data, const QueryVector& y, const KernelGraphConfig& cfg) {
    if (y.size() != data.rows()) {
        throw std::invalid_argument("query vector length does not match point count");
    }
    const Index n = data.rows();
    const SparseMatrix normalized = normalized_kernel_graph(data, cfg);

    SparseMatrix identity(n, n);
    identity.setIdentity();
    SparseMatrix a = identity - cfg.alpha * normalized;
    a.makeCompressed();

    const Vector& rhs = y.values();
    const double rhs_norm = rhs.norm();
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) {
        throw SolverError("factorization of I - alpha*S failed", std::numeric_limits<double>::infinity());
    }
    Vector f = ldlt.solve(rhs);
    double residual = (a * f - rhs).norm() / rhs_norm;
    for (int refine = 0; refine < 3 && residual > 1e-8 && std::isfinite(residual); ++refine) {
        f += ldlt.solve(rhs - a * f);
        residual = (a * f - rhs).norm() / rhs_norm;
    }
    if (!(residual <= 1e-8)) {
        throw SolverError("manifold ranking solve did not reach the residual bound", residual);
    }
    return f;
}

}  // namespace ran
