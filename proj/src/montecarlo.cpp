#include "fundgames/montecarlo.hpp"

#include "fundgames/rng.hpp"

#include <cmath>
#include <random>

namespace fundgames {

namespace {

void check_config(const SimConfig& cfg) {
    detail::require(cfg.horizon > 0.0, "SimConfig: horizon must be > 0");
    detail::require(cfg.steps >= 1, "SimConfig: steps must be >= 1");
    detail::require(cfg.paths >= 1, "SimConfig: paths must be >= 1");
}

struct Coefficients {
    double arith_drift;  // kappa + mu alpha + mu_k beta (wealth drift)
    Exposure exp;
};

std::vector<Coefficients> coefficients(const Population& pop,
                                       const std::vector<ConstantStrategy>& strategies) {
    detail::require(strategies.size() == pop.size(), "simulate: one strategy per manager");
    std::vector<Coefficients> cs;
    cs.reserve(pop.size());
    for (std::size_t k = 0; k < pop.size(); ++k) {
        const auto& s = strategies[k];
        const auto& a = pop.managers[k].asset;
        cs.push_back({pop.market.kappa + pop.market.mu * s.alpha + a.mu_k * s.beta,
                      exposure(s, pop.market, a)});
    }
    return cs;
}

constexpr double kGrowthFloor = 1e-12;

}  // namespace

SimResult simulate(const Population& pop, const std::vector<ConstantStrategy>& strategies,
                   const SimConfig& cfg) {
    check_config(cfg);
    const auto cs = coefficients(pop, strategies);
    const std::size_t n = pop.size();

    SimResult out;
    out.returns.resize(cfg.paths, static_cast<Eigen::Index>(n));

    std::normal_distribution<double> normal(0.0, 1.0);
    if (cfg.scheme == Scheme::Exact) {
        const double sq_t = std::sqrt(cfg.horizon);
        for (long p = 0; p < cfg.paths; ++p) {
            auto common_eng = make_engine(cfg.seed, static_cast<std::uint64_t>(p), 0);
            const double gb = normal(common_eng);
            for (std::size_t k = 0; k < n; ++k) {
                auto own_eng = make_engine(cfg.seed, static_cast<std::uint64_t>(p), k + 1);
                const double gw = normal(own_eng);
                out.returns(p, static_cast<Eigen::Index>(k)) =
                    cs[k].exp.drift * cfg.horizon + cs[k].exp.common * sq_t * gb +
                    cs[k].exp.idio * sq_t * gw;
            }
        }
    } else {
        const double dt = cfg.horizon / cfg.steps;
        const double sq_dt = std::sqrt(dt);
        std::vector<std::mt19937_64> engines;
        std::vector<double> acc(n);
        for (long p = 0; p < cfg.paths; ++p) {
            engines.clear();
            for (std::size_t s = 0; s <= n; ++s)
                engines.push_back(make_engine(cfg.seed, static_cast<std::uint64_t>(p), s));
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int t = 0; t < cfg.steps; ++t) {
                const double db = sq_dt * normal(engines[0]);
                for (std::size_t k = 0; k < n; ++k) {
                    const double dw = sq_dt * normal(engines[k + 1]);
                    const double growth = 1.0 + cs[k].arith_drift * dt + cs[k].exp.common * db +
                                          cs[k].exp.idio * dw;
                    acc[k] += std::log(std::max(growth, kGrowthFloor));
                }
            }
            for (std::size_t k = 0; k < n; ++k)
                out.returns(p, static_cast<Eigen::Index>(k)) = acc[k];
        }
    }

    out.payoffs.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.payoffs.push_back(mc_payoff(out, k, pop.criterion, pop.managers[k].risk_aversion,
                                        pop.managers[k].theta));
    return out;
}

PayoffEstimate mc_payoff(const SimResult& result, std::size_t k, Criterion criterion,
                         double risk_aversion, double theta) {
    const Eigen::Index paths = result.returns.rows();
    const Eigen::Index n = result.returns.cols();
    detail::require(paths >= 1, "mc_payoff: empty result");
    detail::require(static_cast<Eigen::Index>(k) < n, "mc_payoff: manager index out of range");
    detail::require(risk_aversion > 0.0, "mc_payoff: risk_aversion must be > 0");

    const Eigen::VectorXd z = result.returns.col(static_cast<Eigen::Index>(k)) -
                              (theta / static_cast<double>(n)) *
                                  (result.returns.rowwise().sum());
    const double np = static_cast<double>(paths);

    if (criterion == Criterion::ExponentialUtility) {
        const Eigen::ArrayXd u = -(-z.array() / risk_aversion).exp();
        const double mean = u.mean();
        const double var = (u - mean).square().sum() / np;
        return {mean, std::sqrt(var / np)};
    }

    detail::require(paths >= 2, "mc_payoff: mean-variance estimate needs at least 2 paths");
    const double mean = z.mean();
    const Eigen::ArrayXd d = z.array() - mean;
    const double m2 = d.square().sum() / np;
    const double m3 = d.cube().sum() / np;
    const double m4 = d.square().square().sum() / np;
    const double sample_var = m2 * np / (np - 1.0);
    const double value = mean - 0.5 * risk_aversion * sample_var;
    // Delta method for mean - (gamma/2) var.
    const double g = risk_aversion;
    const double asy_var = m2 + 0.25 * g * g * (m4 - m2 * m2) - g * m3;
    return {value, std::sqrt(std::max(asy_var, 0.0) / np)};
}

std::vector<PayoffEstimate> euler_discretization_gap(const Population& pop,
                                                     const std::vector<ConstantStrategy>& strategies,
                                                     const SimConfig& cfg) {
    check_config(cfg);
    const auto cs = coefficients(pop, strategies);
    const std::size_t n = pop.size();
    const double dt = cfg.horizon / cfg.steps;
    const double sq_dt = std::sqrt(dt);

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> sum(n, 0.0), sum2(n, 0.0), acc(n), bsum_own(n);
    std::vector<std::mt19937_64> engines;
    for (long p = 0; p < cfg.paths; ++p) {
        engines.clear();
        for (std::size_t s = 0; s <= n; ++s)
            engines.push_back(make_engine(cfg.seed, static_cast<std::uint64_t>(p), s));
        std::fill(acc.begin(), acc.end(), 0.0);
        std::fill(bsum_own.begin(), bsum_own.end(), 0.0);
        double bsum = 0.0;
        for (int t = 0; t < cfg.steps; ++t) {
            const double db = sq_dt * normal(engines[0]);
            bsum += db;
            for (std::size_t k = 0; k < n; ++k) {
                const double dw = sq_dt * normal(engines[k + 1]);
                bsum_own[k] += dw;
                const double growth =
                    1.0 + cs[k].arith_drift * dt + cs[k].exp.common * db + cs[k].exp.idio * dw;
                acc[k] += std::log(std::max(growth, kGrowthFloor));
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double exact = cs[k].exp.drift * cfg.horizon + cs[k].exp.common * bsum +
                                 cs[k].exp.idio * bsum_own[k];
            const double gap = acc[k] - exact;
            sum[k] += gap;
            sum2[k] += gap * gap;
        }
    }

    std::vector<PayoffEstimate> out;
    out.reserve(n);
    const double np = static_cast<double>(cfg.paths);
    for (std::size_t k = 0; k < n; ++k) {
        const double mean = sum[k] / np;
        const double var = std::max(sum2[k] / np - mean * mean, 0.0);
        out.push_back({mean, std::sqrt(var / np)});
    }
    return out;
}

}  // namespace fundgames
