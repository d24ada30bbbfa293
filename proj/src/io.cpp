#include "ran/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ran {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format value");
    }
    return std::string(buf, end);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

nlohmann::json to_json(const RankResult& result) {
    nlohmann::json j;
    j["scores"] = std::vector<double>(result.scores.data(), result.scores.data() + result.scores.size());
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["objective_trace"] = result.objective_trace;
    j["gamma_mean"] = result.gamma.mean;
    return j;
}

nlohmann::json to_json(const RankConfig& cfg) {
    nlohmann::json j;
    j["k"] = cfg.k;
    j["lambda"] = cfg.lambda;
    j["query_weight"] = cfg.query_weight;
    j["max_iters"] = cfg.max_iters;
    j["tol"] = cfg.tol;
    j["gamma_override"] = cfg.gamma_override ? nlohmann::json(*cfg.gamma_override) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const KernelGraphConfig& cfg) {
    nlohmann::json j;
    j["sigma"] = cfg.sigma ? nlohmann::json(*cfg.sigma) : nlohmann::json(nullptr);
    j["k_sparsify"] = cfg.k_sparsify ? nlohmann::json(*cfg.k_sparsify) : nlohmann::json(nullptr);
    j["alpha"] = cfg.alpha;
    return j;
}

}  // namespace ran
