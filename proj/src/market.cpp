#include "fundgames/market.hpp"

#include <cmath>

namespace fundgames {

Exposure exposure(const ConstantStrategy& strategy, const MarketParams& market,
                  const PrivateAsset& asset) {
    const double common = market.sigma * strategy.alpha + asset.sigma_k * strategy.beta;
    const double idio = asset.nu_k * strategy.beta;
    const double drift = market.kappa + market.mu * strategy.alpha + asset.mu_k * strategy.beta -
                         0.5 * common * common - 0.5 * idio * idio;
    return {drift, common, idio};
}

GaussianLaw return_law(const ConstantStrategy& strategy, const MarketParams& market,
                       const PrivateAsset& asset, double horizon) {
    detail::require(horizon > 0.0, "return_law: horizon must be > 0");
    const Exposure e = exposure(strategy, market, asset);
    return {e.drift * horizon, (e.common * e.common + e.idio * e.idio) * horizon};
}

GaussianLaw excess_law_nplayer(const Population& pop,
                               const std::vector<ConstantStrategy>& strategies, std::size_t k,
                               double horizon) {
    detail::require(horizon > 0.0, "excess_law_nplayer: horizon must be > 0");
    const std::size_t n = pop.size();
    detail::require(strategies.size() == n, "excess_law_nplayer: one strategy per manager");
    detail::require(k < n, "excess_law_nplayer: manager index out of range");

    // Z_T = sum_i w_i R^i_T with w_k = 1 - theta_k/n and w_i = -theta_k/n.
    // The shared B makes the common parts add before squaring; the W^i are
    // independent, so the idiosyncratic parts add in quadrature.
    const double wk = pop.managers[k].theta / static_cast<double>(n);
    double mean_rate = 0.0;
    double common_sum = 0.0;
    double idio2_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Exposure e = exposure(strategies[i], pop.market, pop.managers[i].asset);
        const double w = (i == k) ? 1.0 - wk : -wk;
        mean_rate += w * e.drift;
        common_sum += w * e.common;
        idio2_sum += w * w * e.idio * e.idio;
    }
    return {mean_rate * horizon, (common_sum * common_sum + idio2_sum) * horizon};
}

GaussianLaw excess_law_mfg(const ManagerType& mgr, const MarketParams& market,
                           const ConstantStrategy& strategy, double mean_common,
                           double mean_drift, double horizon) {
    detail::require(horizon > 0.0, "excess_law_mfg: horizon must be > 0");
    const Exposure e = exposure(strategy, market, mgr.asset);
    const double drift = e.drift - mgr.theta * mean_drift;
    const double common = e.common - mgr.theta * mean_common;
    return {drift * horizon, (common * common + e.idio * e.idio) * horizon};
}

double average_common_exposure(const Population& pop,
                               const std::vector<ConstantStrategy>& strategies) {
    detail::require(strategies.size() == pop.size(),
                    "average_common_exposure: one strategy per manager");
    double s = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i)
        s += exposure(strategies[i], pop.market, pop.managers[i].asset).common;
    return s / static_cast<double>(pop.size());
}

}  // namespace fundgames
