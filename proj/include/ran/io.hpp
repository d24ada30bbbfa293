#pragma once

#include "ran/baselines.hpp"
#include "ran/ranking.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace ran {

// scores, iterations, converged, objective_trace, gamma_mean.
nlohmann::json to_json(const RankResult& result);
nlohmann::json to_json(const RankConfig& cfg);
nlohmann::json to_json(const KernelGraphConfig& cfg);

// Shortest text that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ran
