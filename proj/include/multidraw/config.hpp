#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "multidraw/sampling.hpp"

namespace multidraw {

// Configuration problems are reported with a location so the CLI can emit a
// machine-readable error and a nonzero exit code.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string where, const std::string& message)
        : std::runtime_error(message), where_(std::move(where)) {}

    const std::string& where() const { return where_; }

  private:
    std::string where_;
};

// Either an explicit pmf or a named family:
//   {"pmf": [q0, q1, ...]}
//   {"family": "bernoulli", "q0": x}
//   {"family": "constant", "n": k}
//   {"family": "poisson", "lambda": x, "nmax": n}
//   {"family": "geometric", "r": x, "nmax": n}
inline SamplingDistribution parse_sampling_distribution(const nlohmann::json& j, const std::string& where = "dist") {
    try {
        if (!j.is_object()) throw ConfigError(where, "distribution must be a JSON object");
        if (j.contains("pmf")) {
            auto pmf = j.at("pmf").get<std::vector<double>>();
            return SamplingDistribution(std::move(pmf));
        }
        if (!j.contains("family")) throw ConfigError(where, "distribution needs \"pmf\" or \"family\"");
        auto family = j.at("family").get<std::string>();
        if (family == "bernoulli") return SamplingDistribution::bernoulli_draw(j.at("q0").get<double>());
        if (family == "constant") return SamplingDistribution::constant(j.at("n").get<std::size_t>());
        if (family == "poisson") {
            return SamplingDistribution::truncated_poisson(j.at("lambda").get<double>(),
                                                           j.at("nmax").get<std::size_t>());
        }
        if (family == "geometric") {
            return SamplingDistribution::truncated_geometric(j.at("r").get<double>(),
                                                             j.at("nmax").get<std::size_t>());
        }
        throw ConfigError(where + ".family", "unknown family \"" + family + "\"");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(where, e.what());
    }
}

inline SamplingDistribution parse_sampling_distribution(const std::string& text, const std::string& where = "dist") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(where, e.what());
    }
    return parse_sampling_distribution(j, where);
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace multidraw
