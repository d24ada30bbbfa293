#include "ran/affinity.hpp"

#include "ran/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ran {

namespace {

// The `count` nearest candidates ordered by ascending distance, lower index
// first on ties. The rest of the candidates follow in unspecified order.
std::vector<Index> nearest_candidates(const Eigen::Ref<const Vector>& d, std::optional<Index> self,
                                      std::size_t count) {
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(d.size()));
    for (Index j = 0; j < d.size(); ++j) {
        if (!self || j != *self) order.push_back(j);
    }
    const auto closer = [&](Index a, Index b) { return d[a] < d[b] || (d[a] == d[b] && a < b); };
    count = std::min(count, order.size());
    if (count < order.size()) {
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), closer);
    }
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), closer);
    return order;
}

void check_distances(const Eigen::Ref<const Vector>& d) {
    for (Index j = 0; j < d.size(); ++j) {
        if (!std::isfinite(d[j]) || d[j] < 0.0) {
            throw std::invalid_argument("distance " + std::to_string(j) + " is negative or non-finite");
        }
    }
}

// Euclidean projection of v (sorted descending) onto the probability simplex.
std::vector<double> project_sorted_onto_simplex(const std::vector<double>& v) {
    double running = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        running += v[j];
        const double t = (running - 1.0) / static_cast<double>(j + 1);
        if (v[j] - t > 0.0) theta = t;
    }
    std::vector<double> w(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) w[j] = std::max(v[j] - theta, 0.0);
    return w;
}

}  // namespace

double row_gamma(const std::vector<double>& sorted, Index k) {
    const auto m = static_cast<Index>(sorted.size());
    if (k < 1 || k > m) {
        throw std::invalid_argument("k = " + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");
    }
    if (k == m) return 0.0;
    // (k/2) d_(k+1) - (1/2) sum d_(j), summed as gaps so the result is never negative.
    const double next = sorted[static_cast<std::size_t>(k)];
    double gaps = 0.0;
    for (Index j = 0; j < k; ++j) gaps += next - sorted[static_cast<std::size_t>(j)];
    return 0.5 * gaps;
}

NeighborRow assign_neighbors_row(const Eigen::Ref<const Vector>& distances,
                                 std::optional<Index> self, Index k, std::optional<double> gamma) {
    check_distances(distances);
    if (self && (*self < 0 || *self >= distances.size())) {
        throw std::invalid_argument("self index out of range");
    }
    const auto m = distances.size() - (self ? 1 : 0);
    if (k < 1 || k > m) {
        throw std::invalid_argument("k = " + std::to_string(k) + " must be in [1, " + std::to_string(m) +
                                    "] for a row with " + std::to_string(m) + " candidates");
    }
    const auto ku = static_cast<std::size_t>(k);
    // The k+1 nearest decide both gamma and the support.
    const std::vector<Index> order = nearest_candidates(distances, self, ku + 1);

    NeighborRow row;
    row.entries.reserve(ku);

    if (gamma) {
        if (!(*gamma > 0.0) || !std::isfinite(*gamma)) {
            throw std::invalid_argument("fixed gamma must be positive and finite");
        }
        row.gamma = *gamma;
        const double nearest = distances[order[0]];
        std::vector<double> v(ku);
        for (std::size_t j = 0; j < ku; ++j) v[j] = -(distances[order[j]] - nearest) / (2.0 * *gamma);
        const std::vector<double> w = project_sorted_onto_simplex(v);
        for (std::size_t j = 0; j < ku; ++j) {
            if (w[j] > 0.0) row.entries.emplace_back(order[j], w[j]);
        }
        return row;
    }

    std::vector<double> sorted(std::min(order.size(), ku + 1));
    for (std::size_t j = 0; j < sorted.size(); ++j) sorted[j] = distances[order[j]];
    row.gamma = row_gamma(sorted, k);

    if (row.gamma <= 0.0) {
        // k+1 nearest all tied, or no (k+1)-th candidate: uniform over the k nearest.
        for (std::size_t j = 0; j < ku; ++j) row.entries.emplace_back(order[j], 1.0 / static_cast<double>(k));
        return row;
    }

    // s_j = (eta - d_j / (2 gamma))_+. The solution is unchanged when every
    // distance is shifted by the same amount; shifting by -d_(k+1) makes
    // eta = 0 and leaves s_j = (d_(k+1) - d_j) / (2 gamma).
    const double next = sorted[ku];
    for (std::size_t j = 0; j < ku; ++j) {
        const double w = (next - sorted[j]) / (2.0 * row.gamma);
        if (w > 0.0) row.entries.emplace_back(order[j], w);
    }
    return row;
}

namespace {

AffinityResult assemble(const Eigen::MatrixXd& sq_dists, const Vector* scores, double lambda, Index k,
                        std::optional<double> gamma) {
    const Index n = sq_dists.rows();
    if (sq_dists.cols() != n) {
        throw std::invalid_argument("distance matrix must be square");
    }
    if (n < 2) {
        throw std::invalid_argument("need at least 2 points");
    }
    if (k < 1 || k > n - 1) {
        throw std::invalid_argument("k = " + std::to_string(k) + " must be in [1, " + std::to_string(n - 1) + "]");
    }
    if (scores && scores->size() != n) {
        throw std::invalid_argument("score vector length does not match point count");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be finite and nonnegative");
    }

    AffinityResult out;
    out.gamma.per_row.resize(n);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n * k));
    Vector d(n);
    for (Index i = 0; i < n; ++i) {
        d = sq_dists.row(i).transpose();
        if (scores && lambda > 0.0) {
            d.array() += lambda * (scores->array() - (*scores)[i]).square();
        }
        const NeighborRow row = assign_neighbors_row(d, i, k, gamma);
        out.gamma.per_row[i] = row.gamma;
        for (const auto& [j, w] : row.entries) triplets.emplace_back(i, j, w);
    }
    out.gamma.mean = out.gamma.per_row.mean();
    out.affinity.k = k;
    out.affinity.weights.resize(n, n);
    out.affinity.weights.setFromTriplets(triplets.begin(), triplets.end());
    out.affinity.weights.makeCompressed();
    return out;
}

}  // namespace

AffinityResult assign_all_neighbors(const Eigen::MatrixXd& sq_dists, const Vector& scores, double lambda,
                                    Index k, std::optional<double> gamma) {
    return assemble(sq_dists, &scores, lambda, k, gamma);
}

AffinityResult assign_all_neighbors(const Eigen::MatrixXd& sq_dists, Index k, std::optional<double> gamma) {
    return assemble(sq_dists, nullptr, 0.0, k, gamma);
}

AffinityResult assign_all_neighbors(const DataMatrix& data, const std::optional<Vector>& scores,
                                    double lambda, Index k) {
    validate_data(data);
    const Eigen::MatrixXd dx = pairwise_sq_dists(data);
    return scores ? assemble(dx, &*scores, lambda, k, std::nullopt)
                  : assemble(dx, nullptr, 0.0, k, std::nullopt);
}

SparseMatrix laplacian(const SparseRowMatrix& weights) {
    const Index n = weights.rows();
    if (weights.cols() != n) {
        throw std::invalid_argument("affinity must be square");
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(4 * weights.nonZeros()));
    for (Index i = 0; i < n; ++i) {
        for (SparseRowMatrix::InnerIterator it(weights, i); it; ++it) {
            const Index j = it.col();
            const double half = 0.5 * it.value();
            if (i == j || half == 0.0) continue;
            triplets.emplace_back(i, j, -half);
            triplets.emplace_back(j, i, -half);
            triplets.emplace_back(i, i, half);
            triplets.emplace_back(j, j, half);
        }
    }
    SparseMatrix lap(n, n);
    lap.setFromTriplets(triplets.begin(), triplets.end());
    lap.makeCompressed();
    return lap;
}

GammaResult compute_gamma_from_dists(const Eigen::MatrixXd& sq_dists, Index k) {
    const Index n = sq_dists.rows();
    if (k < 1 || k > n - 1) {
        throw std::invalid_argument("k = " + std::to_string(k) + " must be in [1, " + std::to_string(n - 1) + "]");
    }
    GammaResult g;
    g.per_row.resize(n);
    for (Index i = 0; i < n; ++i) {
        const Vector row = sq_dists.row(i).transpose();
        const std::vector<Index> order = nearest_candidates(row, i, static_cast<std::size_t>(k) + 1);
        std::vector<double> sorted(std::min(order.size(), static_cast<std::size_t>(k) + 1));
        for (std::size_t j = 0; j < sorted.size(); ++j) sorted[j] = row[order[j]];
        g.per_row[i] = row_gamma(sorted, k);
    }
    g.mean = g.per_row.mean();
    return g;
}

GammaResult compute_gamma(const DataMatrix& data, Index k) {
    validate_data(data);
    return compute_gamma_from_dists(pairwise_sq_dists(data), k);
}

std::string to_triplet_csv(const SparseAffinity& s) {
    std::string out;
    for (Index i = 0; i < s.weights.outerSize(); ++i) {
        for (SparseRowMatrix::InnerIterator it(s.weights, i); it; ++it) {
            out += std::to_string(i);
            out += ',';
            out += std::to_string(it.col());
            out += ',';
            out += format_double(it.value());
            out += '\n';
        }
    }
    return out;
}

void save_triplet_csv(const SparseAffinity& s, const std::filesystem::path& path) {
    write_text_file(path, to_triplet_csv(s));
}

}  // namespace ran
