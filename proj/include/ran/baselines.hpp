#pragma once

#include "ran/ranking.hpp"
#include "ran/types.hpp"

#include <optional>

namespace ran {

struct KernelGraphConfig {
    // Gaussian bandwidth; unset means the median pairwise distance.
    std::optional<double> sigma;
    // Keep only each point's k strongest edges before symmetrizing.
    std::optional<Index> k_sparsify;
    double alpha = 0.99;
};

// Negated distance to the nearest query; queries score 0.
Vector euclidean_rank(const DataMatrix& data, const QueryVector& y);

// Median of the off-diagonal pairwise Euclidean distances.
double median_pairwise_distance(const DataMatrix& data);

// Symmetrically normalized Gaussian affinity D^{-1/2} W D^{-1/2}. Rows of
// isolated vertices are zero.
SparseMatrix normalized_kernel_graph(const DataMatrix& data, const KernelGraphConfig& cfg);

// f = (I - alpha W~)^{-1} y.
Vector manifold_rank(const DataMatrix& data, const QueryVector& y, const KernelGraphConfig& cfg);

}  // namespace ran
