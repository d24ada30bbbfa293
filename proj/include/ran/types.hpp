#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

namespace ran {

using Index = Eigen::Index;

// One row per data point.
template <typename Scalar>
using DataMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using DataMatrix = DataMatrixT<double>;

using Vector = Eigen::VectorXd;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Raised when a linear solve cannot reach its residual contract.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Throws std::invalid_argument unless the matrix has n >= 2, d >= 1 and only finite entries.
void validate_data(const DataMatrix& data);

}  // namespace ran
