#include "config.hpp"

#include <fstream>
#include <set>

namespace fundgames::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path.empty() ? what : path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& j, const std::string& path, std::set<std::string> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) fail(join(path, key), "unknown field");
}

const json& need(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) fail(join(path, key), "missing field");
    return *it;
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double need_num(const json& j, const char* key, const std::string& path) {
    return num(need(j, key, path), join(path, key));
}

std::string need_str(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

template <typename F>
auto guarded(const std::string& path, F f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

PrivateAsset parse_asset(const json& j, const std::string& path) {
    check_keys(j, path, {"mu", "sigma", "nu"});
    return guarded(path, [&] {
        return PrivateAsset(need_num(j, "mu", path), need_num(j, "sigma", path),
                            need_num(j, "nu", path));
    });
}

ManagerType parse_manager(const json& j, const std::string& path) {
    check_keys(j, path, {"risk_aversion", "theta", "asset"});
    PrivateAsset asset = parse_asset(need(j, "asset", path), path + ".asset");
    return guarded(path, [&] {
        return ManagerType(need_num(j, "risk_aversion", path), need_num(j, "theta", path), asset);
    });
}

Model parse_model(const std::string& s, const std::string& path) {
    if (s == "exp_nplayer") return Model::ExpNPlayer;
    if (s == "exp_mfg") return Model::ExpMfg;
    if (s == "mv_nplayer") return Model::MvNPlayer;
    if (s == "mv_mfg") return Model::MvMfg;
    fail(path, "must be one of exp_nplayer, exp_mfg, mv_nplayer, mv_mfg");
}

Scheme parse_scheme(const std::string& s, const std::string& path) {
    if (s == "exact") return Scheme::Exact;
    if (s == "euler") return Scheme::Euler;
    fail(path, "must be exact or euler");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    check_keys(j, "", {"model", "horizon", "market", "managers", "distribution", "strategies",
                       "simulation", "sweep", "convergence", "output"});

    ExperimentConfig cfg;
    cfg.model = parse_model(need_str(j, "model", ""), "model");

    if (j.contains("horizon")) {
        cfg.horizon = num(j["horizon"], "horizon");
        if (cfg.horizon <= 0.0) fail("horizon", "must be > 0");
    }

    const json& jm = need(j, "market", "");
    check_keys(jm, "market", {"kappa", "mu", "sigma"});
    cfg.market = guarded("market", [&] {
        return MarketParams(need_num(jm, "kappa", "market"), need_num(jm, "mu", "market"),
                            need_num(jm, "sigma", "market"));
    });

    const bool has_managers = j.contains("managers");
    const bool has_dist = j.contains("distribution");
    if (has_managers == has_dist)
        fail("", "exactly one of managers/distribution must be present");
    if (is_mfg(cfg.model) != has_dist)
        fail(has_dist ? "distribution" : "managers", "block does not match the model");

    if (has_managers) {
        const json& arr = j["managers"];
        if (!arr.is_array() || arr.empty()) fail("managers", "expected a nonempty array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.managers.push_back(
                parse_manager(arr[i], "managers[" + std::to_string(i + 1) + "]"));
    } else {
        const json& arr = j["distribution"];
        if (!arr.is_array() || arr.empty()) fail("distribution", "expected a nonempty array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "distribution[" + std::to_string(i + 1) + "]";
            const json& ja = arr[i];
            check_keys(ja, path, {"weight", "risk_aversion", "theta", "asset"});
            PrivateAsset asset = parse_asset(need(ja, "asset", path), path + ".asset");
            ManagerType type = guarded(path, [&] {
                return ManagerType(need_num(ja, "risk_aversion", path),
                                   need_num(ja, "theta", path), asset);
            });
            const double w = need_num(ja, "weight", path);
            if (!(w > 0.0)) fail(path + ".weight", "must be > 0");
            if (type.theta >= 1.0) fail(path + ".theta", "must lie in [0, 1) for mean-field models");
            cfg.distribution.push_back({type, w});
        }
    }

    if (j.contains("strategies")) {
        const json& arr = j["strategies"];
        if (!arr.is_array() || arr.empty()) fail("strategies", "expected a nonempty array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "strategies[" + std::to_string(i + 1) + "]";
            check_keys(arr[i], path, {"alpha", "beta"});
            cfg.strategies.push_back(guarded(path, [&] {
                return ConstantStrategy(need_num(arr[i], "alpha", path),
                                        need_num(arr[i], "beta", path));
            }));
        }
        if (!is_mfg(cfg.model) && cfg.strategies.size() != cfg.managers.size())
            fail("strategies", "length must match managers");
    }

    if (j.contains("simulation")) {
        const json& js = j["simulation"];
        check_keys(js, "simulation", {"paths", "steps", "seed", "scheme"});
        SimConfig sim;
        sim.horizon = cfg.horizon;
        sim.paths = static_cast<long>(need_num(js, "paths", "simulation"));
        if (js.contains("steps")) sim.steps = static_cast<int>(num(js["steps"], "simulation.steps"));
        if (js.contains("seed"))
            sim.seed = static_cast<std::uint64_t>(num(js["seed"], "simulation.seed"));
        if (js.contains("scheme"))
            sim.scheme = parse_scheme(js["scheme"].get<std::string>(), "simulation.scheme");
        if (sim.paths < 1) fail("simulation.paths", "must be >= 1");
        if (sim.steps < 1) fail("simulation.steps", "must be >= 1");
        cfg.simulation = sim;
    }

    if (j.contains("sweep")) {
        const json& js = j["sweep"];
        check_keys(js, "sweep", {"variable", "manager", "from", "to", "points"});
        SweepBlock sw;
        const std::string var = need_str(js, "variable", "sweep");
        if (var == "risk_aversion")
            sw.variable = SweepSpec::Variable::RiskAversion;
        else if (var == "theta")
            sw.variable = SweepSpec::Variable::Theta;
        else
            fail("sweep.variable", "must be risk_aversion or theta");
        if (js.contains("manager")) {
            const long m = static_cast<long>(num(js["manager"], "sweep.manager"));
            if (m < 1) fail("sweep.manager", "must be >= 1 (managers are 1-based)");
            sw.manager = static_cast<std::size_t>(m - 1);
        }
        sw.from = need_num(js, "from", "sweep");
        sw.to = need_num(js, "to", "sweep");
        sw.points = static_cast<int>(need_num(js, "points", "sweep"));
        if (!(sw.from < sw.to)) fail("sweep.from", "must be < sweep.to");
        if (sw.points < 2) fail("sweep.points", "must be >= 2");
        cfg.sweep = sw;
    }

    if (j.contains("convergence")) {
        const json& jc = j["convergence"];
        check_keys(jc, "convergence", {"sizes", "seed"});
        ConvergenceBlock cb;
        const json& sizes = need(jc, "sizes", "convergence");
        if (!sizes.is_array() || sizes.empty()) fail("convergence.sizes", "expected a nonempty array");
        for (const auto& s : sizes) {
            const long v = static_cast<long>(num(s, "convergence.sizes"));
            if (v < 1) fail("convergence.sizes", "entries must be >= 1");
            cb.sizes.push_back(static_cast<std::size_t>(v));
        }
        if (jc.contains("seed"))
            cb.seed = static_cast<std::uint64_t>(num(jc["seed"], "convergence.seed"));
        cfg.convergence = cb;
    }

    if (j.contains("output")) {
        if (!j["output"].is_string()) fail("output", "expected a string");
        cfg.output = j["output"].get<std::string>();
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

nlohmann::ordered_json dump_config(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    switch (cfg.model) {
        case Model::ExpNPlayer: j["model"] = "exp_nplayer"; break;
        case Model::ExpMfg: j["model"] = "exp_mfg"; break;
        case Model::MvNPlayer: j["model"] = "mv_nplayer"; break;
        case Model::MvMfg: j["model"] = "mv_mfg"; break;
    }
    j["horizon"] = cfg.horizon;
    j["market"] = {{"kappa", cfg.market.kappa}, {"mu", cfg.market.mu}, {"sigma", cfg.market.sigma}};

    const auto asset_json = [](const PrivateAsset& a) {
        return nlohmann::ordered_json{{"mu", a.mu_k}, {"sigma", a.sigma_k}, {"nu", a.nu_k}};
    };
    if (!cfg.managers.empty()) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& m : cfg.managers)
            arr.push_back({{"risk_aversion", m.risk_aversion},
                           {"theta", m.theta},
                           {"asset", asset_json(m.asset)}});
        j["managers"] = std::move(arr);
    } else {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& a : cfg.distribution)
            arr.push_back({{"weight", a.weight},
                           {"risk_aversion", a.type.risk_aversion},
                           {"theta", a.type.theta},
                           {"asset", asset_json(a.type.asset)}});
        j["distribution"] = std::move(arr);
    }

    if (!cfg.strategies.empty()) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& s : cfg.strategies) arr.push_back({{"alpha", s.alpha}, {"beta", s.beta}});
        j["strategies"] = std::move(arr);
    }
    if (cfg.simulation) {
        j["simulation"] = {{"paths", cfg.simulation->paths},
                           {"steps", cfg.simulation->steps},
                           {"seed", cfg.simulation->seed},
                           {"scheme", cfg.simulation->scheme == Scheme::Exact ? "exact" : "euler"}};
    }
    if (cfg.sweep) {
        j["sweep"] = {{"variable", cfg.sweep->variable == SweepSpec::Variable::RiskAversion
                                       ? "risk_aversion"
                                       : "theta"},
                      {"manager", cfg.sweep->manager + 1},
                      {"from", cfg.sweep->from},
                      {"to", cfg.sweep->to},
                      {"points", cfg.sweep->points}};
    }
    if (cfg.convergence) {
        j["convergence"] = {{"sizes", cfg.convergence->sizes}, {"seed", cfg.convergence->seed}};
    }
    j["output"] = cfg.output;
    return j;
}

}  // namespace fundgames::cli
