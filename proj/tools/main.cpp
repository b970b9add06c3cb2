#include "config.hpp"

#include "fundgames/csv.hpp"
#include "fundgames/equilibrium.hpp"
#include "fundgames/payoff.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace fundgames;
using namespace fundgames::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct Options {
    std::string config_path;
    std::string output_override;
    bool dump_config = false;
    double tol = 1e-12;
    double improvement_tol = 1e-9;
    std::string deviation_grid;  // "lo,hi,step"
    long paths = -1;
    long steps = -1;
    long long seed = -1;
    std::string scheme;
    std::string dump_paths;
    std::string dump_format = "csv";
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    if (s.empty()) return g;
    double lo, hi, step;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &lo, &hi, &step) != 3)
        throw ConfigError("--deviation-grid: expected LO,HI,STEP");
    g.alpha_min = g.beta_min = lo;
    g.alpha_max = g.beta_max = hi;
    g.step = step;
    if (!(g.step > 0.0) || !(lo <= hi)) throw ConfigError("--deviation-grid: empty grid");
    return g;
}

ExperimentConfig load_with_overrides(const Options& opt) {
    ExperimentConfig cfg = load_config(opt.config_path);
    if (!opt.output_override.empty()) cfg.output = opt.output_override;
    if (opt.paths >= 0 || opt.steps >= 0 || opt.seed >= 0 || !opt.scheme.empty()) {
        SimConfig sim = cfg.simulation.value_or(SimConfig{cfg.horizon, 1, 100000, 0, Scheme::Exact});
        sim.horizon = cfg.horizon;
        if (opt.paths >= 0) sim.paths = opt.paths;
        if (opt.steps >= 0) sim.steps = static_cast<int>(opt.steps);
        if (opt.seed >= 0) sim.seed = static_cast<std::uint64_t>(opt.seed);
        if (opt.scheme == "exact") sim.scheme = Scheme::Exact;
        else if (opt.scheme == "euler") sim.scheme = Scheme::Euler;
        else if (!opt.scheme.empty()) throw ConfigError("--scheme: must be exact or euler");
        cfg.simulation = sim;
    }
    return cfg;
}

fs::path ensure_output_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory: " + cfg.output);
    return dir;
}

Population population_of(const ExperimentConfig& cfg) {
    if (is_mfg(cfg.model)) throw ConfigError("model: this command needs an n-player model");
    return Population(cfg.market, cfg.managers, criterion_of(cfg.model));
}

TypeDistribution distribution_of(const ExperimentConfig& cfg) {
    if (!is_mfg(cfg.model)) throw ConfigError("model: this command needs a mean-field model");
    return TypeDistribution(cfg.distribution);
}

EquilibriumResult closed_form(const Population& pop) {
    return pop.criterion == Criterion::ExponentialUtility ? equilibrium_exp(pop)
                                                          : equilibrium_mv(pop);
}

int cmd_equilibrium(const Options& opt) {
    const ExperimentConfig cfg = load_with_overrides(opt);
    const Population pop = population_of(cfg);
    const EquilibriumResult eq = closed_form(pop);
    const fs::path dir = ensure_output_dir(cfg);

    CsvWriter csv((dir / "equilibrium.csv").string());
    csv.row({"manager", "alpha", "beta", "aggregate"});
    for (std::size_t k = 0; k < pop.size(); ++k)
        csv.row({std::to_string(k + 1), fmt_num(eq.strategies[k].alpha),
                 fmt_num(eq.strategies[k].beta), fmt_num(eq.aggregate)});

    const char* name = pop.criterion == Criterion::ExponentialUtility ? "D" : "K";
    std::cout << "constant equilibrium, n = " << pop.size() << ", aggregate " << name << " = "
              << fmt_num(eq.aggregate) << "\n";
    for (std::size_t k = 0; k < pop.size(); ++k)
        std::cout << "  manager " << k + 1 << ": alpha = " << fmt_num(eq.strategies[k].alpha)
                  << ", beta = " << fmt_num(eq.strategies[k].beta) << "\n";

    // independent cross-check: best-response iteration from zero
    const FixedPointResult fp =
        pop.criterion == Criterion::ExponentialUtility
            ? fixed_point_exp(pop, std::vector<ConstantStrategy>(pop.size()), opt.tol)
            : fixed_point_mv(pop, std::vector<ConstantStrategy>(pop.size()), opt.tol);
    double gap = 0.0, scale = 1.0;
    for (std::size_t k = 0; k < pop.size(); ++k) {
        gap = std::max({gap, std::abs(fp.strategies[k].alpha - eq.strategies[k].alpha),
                        std::abs(fp.strategies[k].beta - eq.strategies[k].beta)});
        scale = std::max({scale, std::abs(eq.strategies[k].alpha),
                          std::abs(eq.strategies[k].beta)});
    }
    std::cout << "fixed-point cross-check: " << fp.iterations << " iterations, max gap "
              << fmt_num(gap) << "\n";
    std::cout << "wrote " << (dir / "equilibrium.csv").string() << "\n";
    if (!fp.converged || gap > 10.0 * opt.tol * scale) {
        std::cerr << "fixed-point iteration disagrees with the closed form\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}

int cmd_mfe(const Options& opt) {
    const ExperimentConfig cfg = load_with_overrides(opt);
    const TypeDistribution dist = distribution_of(cfg);
    const Criterion crit = criterion_of(cfg.model);
    const EquilibriumResult res = mfe_all(dist, cfg.market, crit);
    const fs::path dir = ensure_output_dir(cfg);

    CsvWriter csv((dir / "mfe.csv").string());
    csv.row({"atom", "weight", "alpha", "beta", "aggregate"});
    for (std::size_t i = 0; i < dist.size(); ++i)
        csv.row({std::to_string(i + 1), fmt_num(dist.atoms()[i].weight),
                 fmt_num(res.strategies[i].alpha), fmt_num(res.strategies[i].beta),
                 fmt_num(res.aggregate)});

    const char* name = crit == Criterion::ExponentialUtility ? "L" : "R";
    std::cout << "constant mean-field equilibrium over " << dist.size()
              << " type atoms, aggregate " << name << " = " << fmt_num(res.aggregate) << "\n";
    std::cout << "wrote " << (dir / "mfe.csv").string() << "\n";
    return kExitOk;
}

int cmd_verify(const Options& opt) {
    const ExperimentConfig cfg = load_with_overrides(opt);
    const Population pop = population_of(cfg);
    const std::vector<ConstantStrategy> candidate =
        cfg.strategies.empty() ? closed_form(pop).strategies : cfg.strategies;
    const GridSpec grid = parse_grid(opt.deviation_grid);
    const fs::path dir = ensure_output_dir(cfg);

    CsvWriter csv((dir / "verify.csv").string());
    csv.row({"manager", "improvement", "best_alpha", "best_beta"});
    bool ok = true;
    for (std::size_t k = 0; k < pop.size(); ++k) {
        const DeviationResult dev = deviation_scan(pop, candidate, k, grid, cfg.horizon);
        csv.row({std::to_string(k + 1), fmt_num(dev.improvement),
                 fmt_num(dev.best_deviation.alpha), fmt_num(dev.best_deviation.beta)});
        std::cout << "  manager " << k + 1 << ": improvement = " << fmt_num(dev.improvement)
                  << "\n";
        if (dev.improvement > opt.improvement_tol) ok = false;
    }
    std::cout << (ok ? "no profitable deviation found" : "profitable deviation found") << " (tol "
              << fmt_num(opt.improvement_tol) << ")\n";
    std::cout << "wrote " << (dir / "verify.csv").string() << "\n";
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_simulate(const Options& opt) {
    const ExperimentConfig cfg = load_with_overrides(opt);
    const Population pop = population_of(cfg);
    const std::vector<ConstantStrategy> strategies =
        cfg.strategies.empty() ? closed_form(pop).strategies : cfg.strategies;
    SimConfig sim = cfg.simulation.value_or(SimConfig{cfg.horizon, 1, 100000, 0, Scheme::Exact});
    sim.horizon = cfg.horizon;
    const SimResult res = simulate(pop, strategies, sim);
    const fs::path dir = ensure_output_dir(cfg);

    CsvWriter csv((dir / "simulate.csv").string());
    csv.row({"manager", "payoff", "std_error", "excess_mean", "excess_variance"});
    for (std::size_t k = 0; k < pop.size(); ++k) {
        const Eigen::VectorXd z =
            res.returns.col(static_cast<Eigen::Index>(k)) -
            (pop.managers[k].theta / static_cast<double>(pop.size())) * res.returns.rowwise().sum();
        const double mean = z.mean();
        const double var = (z.array() - mean).square().sum() / std::max<double>(1.0, z.size() - 1);
        csv.row({std::to_string(k + 1), fmt_num(res.payoffs[k].value),
                 fmt_num(res.payoffs[k].std_error), fmt_num(mean), fmt_num(var)});
        std::cout << "  manager " << k + 1 << ": payoff = " << fmt_num(res.payoffs[k].value)
                  << " +/- " << fmt_num(res.payoffs[k].std_error) << "\n";
    }

    if (!opt.dump_paths.empty()) {
        if (opt.dump_format == "csv") {
            CsvWriter paths(opt.dump_paths);
            std::vector<std::string> cells(pop.size());
            for (Eigen::Index p = 0; p < res.returns.rows(); ++p) {
                for (std::size_t k = 0; k < pop.size(); ++k)
                    cells[k] = fmt_num(res.returns(p, static_cast<Eigen::Index>(k)));
                paths.row(cells);
            }
        } else if (opt.dump_format == "bin") {
            std::ofstream out(opt.dump_paths, std::ios::binary);
            if (!out) throw IoError("cannot open path dump: " + opt.dump_paths);
            for (Eigen::Index p = 0; p < res.returns.rows(); ++p)
                for (Eigen::Index k = 0; k < res.returns.cols(); ++k) {
                    const double v = res.returns(p, k);
                    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
                }
            if (!out) throw IoError("write failure: " + opt.dump_paths);
        } else {
            throw ConfigError("--dump-format: must be csv or bin");
        }
    }
    std::cout << "wrote " << (dir / "simulate.csv").string() << "\n";
    return kExitOk;
}

int cmd_sensitivity(const Options& opt) {
    const ExperimentConfig cfg = load_with_overrides(opt);
    const fs::path dir = ensure_output_dir(cfg);
    CsvWriter csv((dir / "sensitivity.csv").string());
    csv.row({"manager", "case", "quantity", "value"});

    if (!is_mfg(cfg.model)) {
        const Population pop = population_of(cfg);
        for (std::size_t k = 0; k < pop.size(); ++k) {
            const StrategyPartials p = pop.criterion == Criterion::ExponentialUtility
                                           ? partials_exp(pop, k)
                                           : partials_mv(pop, k);
            const std::string id = std::to_string(k + 1);
            const std::string label = to_string(classify_case(pop.market, pop.managers[k].asset));
            const auto put = [&](const char* q, double v) { csv.row({id, label, q, fmt_num(v)}); };
            put("dbeta/dtheta_k", p.dbeta_dtheta);
            put("dbeta/dmu", p.dbeta_dmu);
            put("dbeta/dsigma", p.dbeta_dsigma);
            put("dbeta/dmu_k", p.dbeta_dmu_k);
            put("dbeta/dsigma_k", p.dbeta_dsigma_k);
            put("dbeta/dnu_k", p.dbeta_dnu_k);
            put("dbeta/drisk_k", p.dbeta_drisk);
            put("dalpha/dmu", p.dalpha_dmu);
            put("dalpha/dsigma", p.dalpha_dsigma);
            put("dalpha/dmu_k", p.dalpha_dmu_k);
            put("dalpha/dsigma_k", p.dalpha_dsigma_k);
            put("dalpha/dnu_k", p.dalpha_dnu_k);
            for (std::size_t i = 0; i < pop.size(); ++i) {
                csv.row({id, label, "dalpha/dtheta_" + std::to_string(i + 1),
                         fmt_num(p.dalpha_dtheta_all[static_cast<Eigen::Index>(i)])});
                csv.row({id, label, "dalpha/drisk_" + std::to_string(i + 1),
                         fmt_num(p.dalpha_drisk_all[static_cast<Eigen::Index>(i)])});
            }
        }
    } else {
        const TypeDistribution dist = distribution_of(cfg);
        const Criterion crit = criterion_of(cfg.model);
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const ManagerType& t = dist.atoms()[i].type;
            const MfePartials p = partials_mfe(t, cfg.market, dist, crit);
            const std::string id = std::to_string(i + 1);
            const std::string label = to_string(classify_case(cfg.market, t.asset));
            csv.row({id, label, "dalpha_inf/dtheta", fmt_num(p.dalpha_dtheta)});
            csv.row({id, label, "dalpha_inf/drisk", fmt_num(p.dalpha_drisk)});
        }
    }
    std::cout << "wrote " << (dir / "sensitivity.csv").string() << "\n";
    return kExitOk;
}

int cmd_converge(const Options& opt) {
    const ExperimentConfig cfg = load_with_overrides(opt);
    const TypeDistribution dist = distribution_of(cfg);
    if (!cfg.convergence) throw ConfigError("convergence: block required for this command");
    std::uint64_t seed = cfg.convergence->seed;
    if (opt.seed >= 0) seed = static_cast<std::uint64_t>(opt.seed);

    const auto rows = convergence_study(dist, cfg.market, cfg.convergence->sizes, seed,
                                        criterion_of(cfg.model));
    const fs::path dir = ensure_output_dir(cfg);
    CsvWriter csv((dir / "converge.csv").string());
    csv.row({"n", "strategy_distance", "aggregate_gap"});
    for (const auto& r : rows) {
        csv.row({std::to_string(r.n), fmt_num(r.strategy_distance), fmt_num(r.aggregate_gap)});
        std::cout << "  n = " << r.n << ": distance = " << fmt_num(r.strategy_distance)
                  << ", aggregate gap = " << fmt_num(r.aggregate_gap) << "\n";
    }
    std::cout << "wrote " << (dir / "converge.csv").string() << "\n";
    return kExitOk;
}

int cmd_figures(const Options& opt) {
    std::string output = opt.output_override.empty() ? "out" : opt.output_override;
    if (!opt.config_path.empty()) {
        const ExperimentConfig cfg = load_with_overrides(opt);
        output = cfg.output;
        if (!opt.output_override.empty()) output = opt.output_override;
    }
    fs::path dir(output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + output);

    for (const auto& named : builtin_figure_sweeps()) {
        const auto rows = figure_sweep(named.spec);
        const fs::path file = dir / (named.name + ".csv");
        CsvWriter csv(file.string());
        csv.row({named.x_label, "alpha_1"});
        for (const auto& r : rows) csv.row({fmt_num(r.x), fmt_num(r.alpha)});
        const char* shape = strictly_increasing(rows)   ? "strictly increasing"
                            : strictly_decreasing(rows) ? "strictly decreasing"
                                                        : "non-monotone";
        std::cout << "  " << named.name << ": alpha_1 " << shape << " in " << named.x_label
                  << ", wrote " << file.string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Constant equilibria of fund-manager competition games over excess logarithmic\n"
        "returns: closed forms, best-response iteration, deviation verification, Monte\n"
        "Carlo simulation, sensitivity analysis, and mean-field limits.\n\n"
        "Exit codes: 0 success, 1 verification failure, 2 config error, 3 I/O error."};
    app.require_subcommand(1);

    Options opt;
    int (*run)(const Options&) = nullptr;

    const auto add_common = [&](CLI::App* sub, bool config_required = true) {
        auto* pos = sub->add_option("config", opt.config_path, "experiment config (JSON)");
        if (config_required) pos->required()->check(CLI::ExistingFile);
        sub->add_option("--output", opt.output_override, "output directory (overrides config)");
        sub->add_flag("--dump-config", opt.dump_config,
                      "print the canonical form of the parsed config and exit");
        return sub;
    };

    auto* eq = add_common(app.add_subcommand("equilibrium", "closed-form n-player equilibrium"));
    eq->add_option("--tol", opt.tol,
                   "tolerance of the best-response fixed-point cross-check (default 1e-12)");
    eq->callback([&] { run = cmd_equilibrium; });

    auto* mfe = add_common(app.add_subcommand("mfe", "closed-form mean-field equilibrium"));
    mfe->callback([&] { run = cmd_mfe; });

    auto* verify = add_common(
        app.add_subcommand("verify", "scan unilateral deviations of a strategy profile"));
    verify->add_option("--deviation-grid", opt.deviation_grid,
                       "deviation grid LO,HI,STEP (default -10,10,0.05)");
    verify->add_option("--improvement-tol", opt.improvement_tol,
                       "max tolerated payoff improvement (default 1e-9)");
    verify->callback([&] { run = cmd_verify; });

    auto* sim = add_common(app.add_subcommand("simulate", "Monte Carlo payoff estimation"));
    sim->add_option("--paths", opt.paths, "number of simulated paths");
    sim->add_option("--steps", opt.steps, "Euler steps per horizon");
    sim->add_option("--seed", opt.seed, "master RNG seed");
    sim->add_option("--scheme", opt.scheme, "exact or euler");
    sim->add_option("--dump-paths", opt.dump_paths,
                    "dump the paths x managers terminal return matrix to this file");
    sim->add_option("--dump-format", opt.dump_format,
                    "path dump format: csv or bin (headerless row-major doubles)");
    sim->callback([&] { run = cmd_simulate; });

    auto* sens = add_common(
        app.add_subcommand("sensitivity", "closed-form strategy partial derivatives"));
    sens->callback([&] { run = cmd_sensitivity; });

    auto* conv = add_common(app.add_subcommand(
        "converge", "distance between sampled n-player equilibria and the mean-field limit"));
    conv->add_option("--seed", opt.seed, "override the sampling seed");
    conv->callback([&] { run = cmd_converge; });

    auto* figs = add_common(app.add_subcommand("figures", "standard two-manager parameter sweeps"),
                            /*config_required=*/false);
    figs->callback([&] { run = cmd_figures; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (opt.dump_config) {
            if (opt.config_path.empty()) throw ConfigError("--dump-config needs a config file");
            std::cout << dump_config(load_config(opt.config_path)).dump(2) << "\n";
            return kExitOk;
        }
        return run(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIoError;
    }
}
