#pragma once

#include "ran/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ran {

struct LabeledDataset {
    DataMatrix data;
    std::vector<int> labels;

    Index size() const { return data.rows(); }
    Index dim() const { return data.cols(); }
};

// Throws std::invalid_argument if the labels do not match the data.
void validate_dataset(const LabeledDataset& ds);

// Two interleaved half circles. The upper moon is (cos t, sin t), the lower
// (1 - cos t, 0.5 - sin t), with t evenly spaced over [0, pi] so the moon
// endpoints are always present. Noise is isotropic Gaussian. Labels are 0
// (upper) then 1 (lower).
LabeledDataset gen_two_moons(Index n_per_moon, double noise_sd, std::uint64_t seed);

// Concentric circles with uniformly random angles in [0, 2pi). Labels
// 0, 1, 2 from the innermost ring outward.
LabeledDataset gen_three_rings(Index n_per_ring, const std::array<double, 3>& radii,
                               double noise_sd, std::uint64_t seed);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t row, std::size_t column)
        : std::runtime_error(msg), row_(row), column_(column) {}

    // 1-based; 0 when the error is not tied to a cell.
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

// Headerless comma-separated numeric file. label_column (0-based) is removed
// from the features and parsed as an integer class id; without it every label
// is 0.
LabeledDataset load_csv(const std::filesystem::path& path,
                        std::optional<Index> label_column = std::nullopt);
LabeledDataset parse_csv(const std::string& text, std::optional<Index> label_column = std::nullopt);

// Writes features followed by the label as the last column, using the
// shortest round-trip representation of each value.
void save_csv(const LabeledDataset& ds, const std::filesystem::path& path);
std::string to_csv(const LabeledDataset& ds);

enum class NormalizeMode { none, zscore_per_point, zscore_per_feature };

NormalizeMode parse_normalize_mode(const std::string& name);

struct NormalizeResult {
    DataMatrix data;
    // Rows (per point) or columns (per feature) with zero variance; these are
    // centered but left unscaled.
    std::vector<Index> zero_variance;

    bool warning() const { return !zero_variance.empty(); }
};

// Population z-score (divides by the count, not count - 1).
NormalizeResult normalize(const DataMatrix& data, NormalizeMode mode);

// Picks per_class members of every class in a seeded random order, keeping
// the picks in their original relative order. Classes smaller than per_class
// are rejected.
LabeledDataset class_balanced_subset(const LabeledDataset& ds, Index per_class, std::uint64_t seed);

}  // namespace ran
