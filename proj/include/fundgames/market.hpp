#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fundgames {

namespace detail {
inline void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}
}  // namespace detail

/// Public market: risk-free rate kappa and the public risky asset with
/// excess mean return mu and volatility sigma (all per unit time).
struct MarketParams {
    double kappa;
    double mu;
    double sigma;

    MarketParams(double kappa_, double mu_, double sigma_)
        : kappa(kappa_), mu(mu_), sigma(sigma_) {
        detail::require(kappa > 0.0, "MarketParams: kappa must be > 0");
        detail::require(mu > 0.0, "MarketParams: mu must be > 0");
        detail::require(sigma > 0.0, "MarketParams: sigma must be > 0");
    }

    double sharpe() const { return mu / sigma; }
};

/// One manager's private risky asset. sigma_k loads on the common shock and
/// may be negative; nu_k is the idiosyncratic volatility.
struct PrivateAsset {
    double mu_k;
    double sigma_k;
    double nu_k;

    PrivateAsset(double mu_k_, double sigma_k_, double nu_k_)
        : mu_k(mu_k_), sigma_k(sigma_k_), nu_k(nu_k_) {
        detail::require(mu_k > 0.0, "PrivateAsset: mu_k must be > 0");
        detail::require(nu_k > 0.0, "PrivateAsset: nu_k must be > 0");
    }

    /// Correlation with the public risky asset; lies in (-1, 1) since nu_k > 0.
    double correlation_with_market() const {
        return sigma_k / std::sqrt(sigma_k * sigma_k + nu_k * nu_k);
    }
};

/// A manager's type: risk aversion (delta under exponential utility, gamma
/// under mean-variance), competition weight theta, and private asset.
struct ManagerType {
    double risk_aversion;
    double theta;
    PrivateAsset asset;

    ManagerType(double risk_aversion_, double theta_, PrivateAsset asset_)
        : risk_aversion(risk_aversion_), theta(theta_), asset(asset_) {
        detail::require(risk_aversion > 0.0, "ManagerType: risk_aversion must be > 0");
        detail::require(theta >= 0.0 && theta <= 1.0, "ManagerType: theta must lie in [0, 1]");
    }
};

/// Allocation fractions in the public risky asset (alpha) and the private
/// asset (beta). Short selling is allowed, so both are unrestricted reals.
struct ConstantStrategy {
    double alpha = 0.0;
    double beta = 0.0;

    ConstantStrategy() = default;
    ConstantStrategy(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
        detail::require(std::isfinite(alpha) && std::isfinite(beta),
                        "ConstantStrategy: components must be finite");
    }

    Eigen::Vector2d vec() const { return Eigen::Vector2d(alpha, beta); }
    static ConstantStrategy from(const Eigen::Vector2d& v) { return {v[0], v[1]}; }
};

/// Mean and variance of a terminal (excess) log-return. Constant strategies
/// make these returns Gaussian; a zero variance is a valid degenerate law.
struct GaussianLaw {
    double mean = 0.0;
    double variance = 0.0;

    GaussianLaw() = default;
    GaussianLaw(double mean_, double variance_) : mean(mean_), variance(variance_) {
        detail::require(variance >= 0.0, "GaussianLaw: variance must be >= 0");
    }
};

enum class Criterion { ExponentialUtility, MeanVariance };

/// A finite population sharing one market. risk_aversion fields are read as
/// delta or gamma according to the criterion.
struct Population {
    MarketParams market;
    std::vector<ManagerType> managers;
    Criterion criterion;

    Population(MarketParams market_, std::vector<ManagerType> managers_, Criterion criterion_)
        : market(market_), managers(std::move(managers_)), criterion(criterion_) {
        detail::require(!managers.empty(), "Population: needs at least one manager");
        // theta <= 1 and risk_aversion > 0 make both aggregate denominators
        // positive; assert anyway.
        double s = 0.0;
        for (const auto& m : managers) {
            s += (criterion == Criterion::ExponentialUtility)
                     ? m.theta / (1.0 + m.risk_aversion)
                     : m.risk_aversion * m.theta / (1.0 + m.risk_aversion);
        }
        detail::require(1.0 - s / static_cast<double>(managers.size()) > 0.0,
                        "Population: aggregate denominator must be positive");
    }

    std::size_t size() const { return managers.size(); }
};

/// Coefficients of the log-return dynamics under a constant strategy:
/// dR = drift dt + common dB + idio dW.
struct Exposure {
    double drift;
    double common;
    double idio;
};

Exposure exposure(const ConstantStrategy& strategy, const MarketParams& market,
                  const PrivateAsset& asset);

/// Gaussian law of the terminal log-return R_T.
GaussianLaw return_law(const ConstantStrategy& strategy, const MarketParams& market,
                       const PrivateAsset& asset, double horizon = 1.0);

/// Gaussian law of manager k's excess log-return
/// Z_T = R^k_T - (theta_k / n) sum_i R^i_T under the given strategy profile.
/// The common shock is shared across managers; idiosyncratic shocks are not.
GaussianLaw excess_law_nplayer(const Population& pop,
                               const std::vector<ConstantStrategy>& strategies, std::size_t k,
                               double horizon = 1.0);

/// Gaussian law of the representative manager's excess log-return
/// Z_T = R_T - theta * Rbar_T in the mean-field model, where the population
/// benchmark Rbar has drift mean_drift and common-shock loading mean_common.
GaussianLaw excess_law_mfg(const ManagerType& mgr, const MarketParams& market,
                           const ConstantStrategy& strategy, double mean_common,
                           double mean_drift, double horizon = 1.0);

/// (1/n) sum_i sigma~_i' pi_i, the population-average common-shock exposure.
/// At equilibrium this equals the aggregate D (exponential) or K (mean-variance).
double average_common_exposure(const Population& pop,
                               const std::vector<ConstantStrategy>& strategies);

}  // namespace fundgames
