#include "fundgames/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace fundgames {

namespace {

Eigen::Matrix2d gram_matrix(const MarketParams& market, const PrivateAsset& asset) {
    // M = sigma~ sigma~' + nu~ nu~'; positive definite since sigma, nu_k > 0.
    Eigen::Matrix2d m;
    m << market.sigma * market.sigma, market.sigma * asset.sigma_k,
        market.sigma * asset.sigma_k, asset.sigma_k * asset.sigma_k + asset.nu_k * asset.nu_k;
    return m;
}

Eigen::Vector2d mu_vec(const MarketParams& market, const PrivateAsset& asset) {
    return Eigen::Vector2d(market.mu, asset.mu_k);
}

Eigen::Vector2d sigma_vec(const MarketParams& market, const PrivateAsset& asset) {
    return Eigen::Vector2d(market.sigma, asset.sigma_k);
}

// (1/n) sum_{i != k} sigma~_i' pi_i over the others profile.
double peer_common_average(const Population& pop, const std::vector<ConstantStrategy>& others,
                           std::size_t k) {
    const std::size_t n = pop.size();
    detail::require(others.size() + 1 == n, "best response: others must have length n - 1");
    detail::require(k < n, "best response: manager index out of range");
    double s = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        s += exposure(others[j++], pop.market, pop.managers[i].asset).common;
    }
    return s / static_cast<double>(n);
}

// Shared solve for both games: (1 + risk - coupling/n) M pi = own_weight mu~ + coupling B sigma~,
// with coupling = theta (exponential) or gamma theta (mean-variance).
ConstantStrategy solve_response(const Population& pop, std::size_t k, double own_weight,
                                double coupling, double peer_common) {
    const ManagerType& mgr = pop.managers[k];
    const Eigen::Matrix2d m = gram_matrix(pop.market, mgr.asset);
    const Eigen::Vector2d rhs = own_weight * mu_vec(pop.market, mgr.asset) +
                                coupling * peer_common * sigma_vec(pop.market, mgr.asset);
    const double n = static_cast<double>(pop.size());
    const double scale = 1.0 + mgr.risk_aversion - coupling / n;
    const Eigen::Vector2d pi = (scale * m).partialPivLu().solve(rhs);
    detail::require(pi.allFinite(), "best response: singular system");
    return ConstantStrategy::from(pi);
}

template <typename Responder>
FixedPointResult iterate_responses(const Population& pop,
                                   const std::vector<ConstantStrategy>& init, double tol,
                                   int max_iter, Responder respond) {
    detail::require(init.size() == pop.size(), "fixed point: one initial strategy per manager");
    detail::require(tol > 0.0, "fixed point: tol must be > 0");
    detail::require(max_iter >= 1, "fixed point: max_iter must be >= 1");

    const std::size_t n = pop.size();
    FixedPointResult out;
    out.strategies = init;
    double prev_residual = std::numeric_limits<double>::infinity();

    std::vector<ConstantStrategy> next(n);
    std::vector<ConstantStrategy> others(n > 1 ? n - 1 : 0);
    for (int iter = 1; iter <= max_iter; ++iter) {
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t j = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (i != k) others[j++] = out.strategies[i];
            next[k] = respond(others, k);
        }
        double residual = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            residual = std::max(residual, std::abs(next[k].alpha - out.strategies[k].alpha));
            residual = std::max(residual, std::abs(next[k].beta - out.strategies[k].beta));
        }
        if (residual > prev_residual) {
            // Dampen: the closed-form games contract under plain Jacobi
            // sweeps, but keep the iteration robust anyway.
            for (std::size_t k = 0; k < n; ++k) {
                next[k].alpha = 0.5 * (next[k].alpha + out.strategies[k].alpha);
                next[k].beta = 0.5 * (next[k].beta + out.strategies[k].beta);
            }
            residual *= 0.5;
        }
        out.strategies = next;
        out.iterations = iter;
        out.residual = residual;
        prev_residual = residual;
        if (residual < tol) {
            out.converged = true;
            break;
        }
    }
    out.aggregate = average_common_exposure(pop, out.strategies);
    return out;
}

}  // namespace

double aggregate_D(const Population& pop) {
    detail::require(pop.criterion == Criterion::ExponentialUtility,
                    "aggregate_D: exponential-utility population required");
    const double n = static_cast<double>(pop.size());
    double num = 0.0, den = 0.0;
    for (const auto& m : pop.managers) {
        num += m.risk_aversion / (1.0 + m.risk_aversion);
        den += m.theta / (1.0 + m.risk_aversion);
    }
    num = (num / n) * pop.market.sharpe();
    den = 1.0 - den / n;
    detail::require(den > 0.0, "aggregate_D: nonpositive denominator");
    return num / den;
}

EquilibriumResult equilibrium_exp(const Population& pop) {
    detail::require(pop.criterion == Criterion::ExponentialUtility,
                    "equilibrium_exp: exponential-utility population required");
    const double d = aggregate_D(pop);
    const double n = static_cast<double>(pop.size());
    const MarketParams& mk = pop.market;
    EquilibriumResult out;
    out.aggregate = d;
    out.strategies.reserve(pop.size());
    for (const auto& m : pop.managers) {
        const double de = m.risk_aversion;
        const double cross = mk.mu * m.asset.sigma_k - m.asset.mu_k * mk.sigma;
        const double den_k = 1.0 + de - m.theta / n;
        const double nu2 = m.asset.nu_k * m.asset.nu_k;
        const double alpha = de * m.asset.sigma_k * cross / (den_k * mk.sigma * mk.sigma * nu2) +
                             (mk.mu * de + m.theta * mk.sigma * d) /
                                 ((1.0 + de) * mk.sigma * mk.sigma);
        const double beta = -de * cross / (den_k * mk.sigma * nu2);
        out.strategies.emplace_back(alpha, beta);
    }
    return out;
}

ConstantStrategy best_response_exp(const Population& pop,
                                   const std::vector<ConstantStrategy>& others, std::size_t k) {
    detail::require(pop.criterion == Criterion::ExponentialUtility,
                    "best_response_exp: exponential-utility population required");
    const double b = peer_common_average(pop, others, k);
    const ManagerType& mgr = pop.managers[k];
    return solve_response(pop, k, mgr.risk_aversion, mgr.theta, b);
}

FixedPointResult fixed_point_exp(const Population& pop, const std::vector<ConstantStrategy>& init,
                                 double tol, int max_iter) {
    return iterate_responses(pop, init, tol, max_iter,
                             [&pop](const std::vector<ConstantStrategy>& others, std::size_t k) {
                                 return best_response_exp(pop, others, k);
                             });
}

double aggregate_K(const Population& pop) {
    detail::require(pop.criterion == Criterion::MeanVariance,
                    "aggregate_K: mean-variance population required");
    const double n = static_cast<double>(pop.size());
    double num = 0.0, den = 0.0;
    for (const auto& m : pop.managers) {
        num += 1.0 / (1.0 + m.risk_aversion);
        den += m.risk_aversion * m.theta / (1.0 + m.risk_aversion);
    }
    num = (num / n) * pop.market.sharpe();
    den = 1.0 - den / n;
    detail::require(den > 0.0, "aggregate_K: nonpositive denominator");
    return num / den;
}

EquilibriumResult equilibrium_mv(const Population& pop) {
    detail::require(pop.criterion == Criterion::MeanVariance,
                    "equilibrium_mv: mean-variance population required");
    const double kk = aggregate_K(pop);
    const double n = static_cast<double>(pop.size());
    const MarketParams& mk = pop.market;
    EquilibriumResult out;
    out.aggregate = kk;
    out.strategies.reserve(pop.size());
    for (const auto& m : pop.managers) {
        const double ga = m.risk_aversion;
        const double cross = mk.mu * m.asset.sigma_k - m.asset.mu_k * mk.sigma;
        const double den_k = 1.0 + ga - ga * m.theta / n;
        const double nu2 = m.asset.nu_k * m.asset.nu_k;
        // The competition load on the aggregate K is gamma theta, matching
        // the first-order condition and the gamma theta/(1+gamma) weights
        // inside K itself.
        const double alpha = m.asset.sigma_k * cross / (den_k * mk.sigma * mk.sigma * nu2) +
                             (mk.mu + ga * m.theta * mk.sigma * kk) /
                                 ((1.0 + ga) * mk.sigma * mk.sigma);
        const double beta = -cross / (den_k * mk.sigma * nu2);
        out.strategies.emplace_back(alpha, beta);
    }
    return out;
}

ConstantStrategy best_response_mv(const Population& pop,
                                  const std::vector<ConstantStrategy>& others, std::size_t k) {
    detail::require(pop.criterion == Criterion::MeanVariance,
                    "best_response_mv: mean-variance population required");
    const double b = peer_common_average(pop, others, k);
    const ManagerType& mgr = pop.managers[k];
    return solve_response(pop, k, 1.0, mgr.risk_aversion * mgr.theta, b);
}

FixedPointResult fixed_point_mv(const Population& pop, const std::vector<ConstantStrategy>& init,
                                double tol, int max_iter) {
    return iterate_responses(pop, init, tol, max_iter,
                             [&pop](const std::vector<ConstantStrategy>& others, std::size_t k) {
                                 return best_response_mv(pop, others, k);
                             });
}

Eigen::Vector2d mv_first_order_residual(const Population& pop,
                                        const std::vector<ConstantStrategy>& strategies,
                                        std::size_t k) {
    detail::require(strategies.size() == pop.size(),
                    "mv_first_order_residual: one strategy per manager");
    detail::require(k < pop.size(), "mv_first_order_residual: manager index out of range");
    const std::size_t n = pop.size();
    double b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        b += exposure(strategies[i], pop.market, pop.managers[i].asset).common;
    }
    b /= static_cast<double>(n);
    const ManagerType& mgr = pop.managers[k];
    const double scale =
        1.0 + mgr.risk_aversion - mgr.risk_aversion * mgr.theta / static_cast<double>(n);
    return mu_vec(pop.market, mgr.asset) +
           mgr.risk_aversion * mgr.theta * b * sigma_vec(pop.market, mgr.asset) -
           scale * gram_matrix(pop.market, mgr.asset) * strategies[k].vec();
}

}  // namespace fundgames
