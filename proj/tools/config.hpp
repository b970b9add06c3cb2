#pragma once

#include "fundgames/market.hpp"
#include "fundgames/mfg.hpp"
#include "fundgames/montecarlo.hpp"
#include "fundgames/sensitivity.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fundgames::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Model { ExpNPlayer, ExpMfg, MvNPlayer, MvMfg };

inline bool is_mfg(Model m) { return m == Model::ExpMfg || m == Model::MvMfg; }
inline Criterion criterion_of(Model m) {
    return (m == Model::ExpNPlayer || m == Model::ExpMfg) ? Criterion::ExponentialUtility
                                                          : Criterion::MeanVariance;
}

struct SweepBlock {
    SweepSpec::Variable variable = SweepSpec::Variable::RiskAversion;
    std::size_t manager = 0;  // 0-based internally; 1-based in the file
    double from = 0.0;
    double to = 1.0;
    int points = 100;
};

struct ConvergenceBlock {
    std::vector<std::size_t> sizes;
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    Model model = Model::ExpNPlayer;
    double horizon = 1.0;
    MarketParams market{0.02, 1.0, 1.0};
    std::vector<ManagerType> managers;       // n-player models
    std::vector<TypeAtom> distribution;      // mean-field models
    std::vector<ConstantStrategy> strategies;  // optional candidate profile
    std::optional<SimConfig> simulation;
    std::optional<SweepBlock> sweep;
    std::optional<ConvergenceBlock> convergence;
    std::string output = "out";
};

/// Parses and validates a config file. Errors name the offending field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& j);

/// Canonical re-serialization; parse(dump(c)) reproduces the experiment.
nlohmann::ordered_json dump_config(const ExperimentConfig& cfg);

}  // namespace fundgames::cli
