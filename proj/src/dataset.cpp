#include "ran/dataset.hpp"

#include "ran/io.hpp"
#include "ran/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <string_view>

namespace ran {

void validate_data(const DataMatrix& data) {
    if (data.rows() < 2) {
        throw std::invalid_argument("data needs at least 2 points, got " + std::to_string(data.rows()));
    }
    if (data.cols() < 1) {
        throw std::invalid_argument("data needs at least 1 feature");
    }
    if (!data.allFinite()) {
        throw std::invalid_argument("data contains non-finite values");
    }
}

void validate_dataset(const LabeledDataset& ds) {
    validate_data(ds.data);
    if (static_cast<Index>(ds.labels.size()) != ds.data.rows()) {
        throw std::invalid_argument("label count " + std::to_string(ds.labels.size()) +
                                    " does not match point count " + std::to_string(ds.data.rows()));
    }
}

LabeledDataset gen_two_moons(Index n_per_moon, double noise_sd, std::uint64_t seed) {
    if (n_per_moon < 2) {
        throw std::invalid_argument("two moons needs at least 2 points per moon");
    }
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw std::invalid_argument("noise_sd must be a finite nonnegative number");
    }
    Rng rng(seed);
    LabeledDataset ds;
    ds.data.resize(2 * n_per_moon, 2);
    ds.labels.resize(2 * n_per_moon);
    const double step = std::numbers::pi / static_cast<double>(n_per_moon - 1);
    for (Index i = 0; i < n_per_moon; ++i) {
        const double t = step * static_cast<double>(i);
        ds.data(i, 0) = std::cos(t);
        ds.data(i, 1) = std::sin(t);
        ds.labels[i] = 0;
    }
    for (Index i = 0; i < n_per_moon; ++i) {
        const double t = step * static_cast<double>(i);
        ds.data(n_per_moon + i, 0) = 1.0 - std::cos(t);
        ds.data(n_per_moon + i, 1) = 0.5 - std::sin(t);
        ds.labels[n_per_moon + i] = 1;
    }
    if (noise_sd > 0.0) {
        for (Index i = 0; i < ds.data.rows(); ++i) {
            ds.data(i, 0) += rng.normal(0.0, noise_sd);
            ds.data(i, 1) += rng.normal(0.0, noise_sd);
        }
    }
    return ds;
}

LabeledDataset gen_three_rings(Index n_per_ring, const std::array<double, 3>& radii,
                               double noise_sd, std::uint64_t seed) {
    if (n_per_ring < 1) {
        throw std::invalid_argument("three rings needs at least 1 point per ring");
    }
    if (!(radii[0] > 0.0 && radii[0] < radii[1] && radii[1] < radii[2]) || !std::isfinite(radii[2])) {
        throw std::invalid_argument("ring radii must be positive and strictly increasing");
    }
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw std::invalid_argument("noise_sd must be a finite nonnegative number");
    }
    Rng rng(seed);
    LabeledDataset ds;
    ds.data.resize(3 * n_per_ring, 2);
    ds.labels.resize(3 * n_per_ring);
    Index row = 0;
    for (int ring = 0; ring < 3; ++ring) {
        for (Index i = 0; i < n_per_ring; ++i, ++row) {
            const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
            ds.data(row, 0) = radii[ring] * std::cos(angle);
            ds.data(row, 1) = radii[ring] * std::sin(angle);
            ds.labels[row] = ring;
        }
    }
    if (noise_sd > 0.0) {
        for (Index i = 0; i < ds.data.rows(); ++i) {
            ds.data(i, 0) += rng.normal(0.0, noise_sd);
            ds.data(i, 1) += rng.normal(0.0, noise_sd);
        }
    }
    return ds;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
    const std::string_view t = trim(cell);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                             ": not a finite number: '" + std::string(t) + "'",
                         row, col);
    }
    return v;
}

}  // namespace

LabeledDataset parse_csv(const std::string& text, std::optional<Index> label_column) {
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::string_view rest(text);
    std::size_t row_no = 0;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++row_no;
        if (trim(line).empty()) {
            if (rest.empty()) break;  // trailing newline
            throw ParseError("row " + std::to_string(row_no) + ": empty line", row_no, 0);
        }
        std::vector<double> values;
        std::size_t col = 0;
        std::string_view cells = line;
        while (true) {
            const std::size_t comma = cells.find(',');
            ++col;
            values.push_back(parse_cell(cells.substr(0, comma), row_no, col));
            if (comma == std::string_view::npos) break;
            cells = cells.substr(comma + 1);
        }
        if (rows.empty()) {
            width = values.size();
        } else if (values.size() != width) {
            throw ParseError("row " + std::to_string(row_no) + ": expected " + std::to_string(width) +
                                 " columns, found " + std::to_string(values.size()),
                             row_no, std::min(values.size(), width) + 1);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw ParseError("empty file", 0, 0);
    }
    if (label_column && (*label_column < 0 || static_cast<std::size_t>(*label_column) >= width)) {
        throw ParseError("label column " + std::to_string(*label_column) + " out of range for " +
                             std::to_string(width) + " columns",
                         0, 0);
    }
    const Index n = static_cast<Index>(rows.size());
    const Index d = static_cast<Index>(width) - (label_column ? 1 : 0);
    if (n < 2 || d < 1) {
        throw ParseError("need at least 2 rows and 1 feature column", 0, 0);
    }
    LabeledDataset ds;
    ds.data.resize(n, d);
    ds.labels.assign(n, 0);
    for (Index i = 0; i < n; ++i) {
        Index out_col = 0;
        for (Index c = 0; c < static_cast<Index>(width); ++c) {
            const double v = rows[i][c];
            if (label_column && c == *label_column) {
                if (v != std::floor(v) || std::abs(v) > 2147483647.0) {
                    throw ParseError("row " + std::to_string(i + 1) + ", column " + std::to_string(c + 1) +
                                         ": label is not an integer",
                                     i + 1, c + 1);
                }
                ds.labels[i] = static_cast<int>(v);
            } else {
                ds.data(i, out_col++) = v;
            }
        }
    }
    return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path, std::optional<Index> label_column) {
    return parse_csv(read_text_file(path), label_column);
}

std::string to_csv(const LabeledDataset& ds) {
    validate_dataset(ds);
    std::string out;
    for (Index i = 0; i < ds.size(); ++i) {
        for (Index c = 0; c < ds.dim(); ++c) {
            out += format_double(ds.data(i, c));
            out += ',';
        }
        out += std::to_string(ds.labels[i]);
        out += '\n';
    }
    return out;
}

void save_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
    write_text_file(path, to_csv(ds));
}

NormalizeMode parse_normalize_mode(const std::string& name) {
    if (name == "none") return NormalizeMode::none;
    if (name == "zscore_per_point") return NormalizeMode::zscore_per_point;
    if (name == "zscore_per_feature") return NormalizeMode::zscore_per_feature;
    throw std::invalid_argument("unknown normalization mode '" + name + "'");
}

namespace {

// Returns true if the vector had zero variance (centered only).
template <typename Vec>
bool zscore_in_place(Vec&& v) {
    const double mean = v.mean();
    v.array() -= mean;
    const double sd = std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
    const double scale = std::max(1.0, std::abs(mean));
    if (sd <= 1e-12 * scale) {
        v.setZero();
        return true;
    }
    v /= sd;
    return false;
}

}  // namespace

NormalizeResult normalize(const DataMatrix& data, NormalizeMode mode) {
    NormalizeResult result{data, {}};
    switch (mode) {
    case NormalizeMode::none:
        break;
    case NormalizeMode::zscore_per_point:
        for (Index i = 0; i < data.rows(); ++i) {
            if (zscore_in_place(result.data.row(i))) result.zero_variance.push_back(i);
        }
        break;
    case NormalizeMode::zscore_per_feature:
        for (Index c = 0; c < data.cols(); ++c) {
            if (zscore_in_place(result.data.col(c))) result.zero_variance.push_back(c);
        }
        break;
    }
    return result;
}

LabeledDataset class_balanced_subset(const LabeledDataset& ds, Index per_class, std::uint64_t seed) {
    validate_dataset(ds);
    if (per_class < 1) {
        throw std::invalid_argument("per_class must be positive");
    }
    std::map<int, std::vector<Index>> members;
    for (Index i = 0; i < ds.size(); ++i) members[ds.labels[i]].push_back(i);

    Rng rng(seed);
    std::vector<Index> picked;
    for (auto& [label, idx] : members) {
        if (static_cast<Index>(idx.size()) < per_class) {
            throw std::invalid_argument("class " + std::to_string(label) + " has only " +
                                        std::to_string(idx.size()) + " members");
        }
        for (std::size_t i = idx.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
            std::swap(idx[i], idx[std::min(j, i)]);
        }
        picked.insert(picked.end(), idx.begin(), idx.begin() + per_class);
    }
    std::sort(picked.begin(), picked.end());

    LabeledDataset out;
    out.data.resize(static_cast<Index>(picked.size()), ds.dim());
    out.labels.resize(picked.size());
    for (std::size_t r = 0; r < picked.size(); ++r) {
        out.data.row(static_cast<Index>(r)) = ds.data.row(picked[r]);
        out.labels[r] = ds.labels[picked[r]];
    }
    return out;
}

}  // namespace ran
