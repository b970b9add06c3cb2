#pragma once

#include "fundgames/market.hpp"
#include "fundgames/mfg.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fundgames {

/// Classification of a private asset against the public one by the sign of
/// sigma_k and the gap between mu/sigma and the virtual Sharpe ratio
/// mu_k/sigma_k. Boundary covers sigma_k = 0 and mu sigma_k = mu_k sigma.
enum class CaseLabel { Case1, Case2, Case3, Boundary };

CaseLabel classify_case(const MarketParams& market, const PrivateAsset& asset);

const char* to_string(CaseLabel label);

/// Closed-form partial derivatives of manager k's equilibrium strategy with
/// respect to the market, own-asset, and competition parameters. The
/// dalpha_dtheta_all / dalpha_drisk_all vectors are indexed by manager, so
/// entry k repeats the own-parameter derivative.
struct StrategyPartials {
    double dbeta_dtheta = 0.0;
    double dbeta_dmu = 0.0;
    double dbeta_dsigma = 0.0;
    double dbeta_dmu_k = 0.0;
    double dbeta_dsigma_k = 0.0;
    double dbeta_dnu_k = 0.0;
    double dbeta_drisk = 0.0;

    double dalpha_dmu = 0.0;
    double dalpha_dsigma = 0.0;
    double dalpha_dmu_k = 0.0;
    double dalpha_dsigma_k = 0.0;
    double dalpha_dnu_k = 0.0;
    double dalpha_dtheta = 0.0;
    double dalpha_drisk = 0.0;

    Eigen::VectorXd dalpha_dtheta_all;
    Eigen::VectorXd dalpha_drisk_all;
};

StrategyPartials partials_exp(const Population& pop, std::size_t k);
StrategyPartials partials_mv(const Population& pop, std::size_t k);

/// Partials of the mean-field strategy's public-asset component with respect
/// to the manager's own theta and risk aversion, holding the type
/// distribution (hence L or R) fixed.
struct MfePartials {
    double dalpha_dtheta = 0.0;
    double dalpha_drisk = 0.0;
};

MfePartials partials_mfe(const ManagerType& mgr, const MarketParams& market,
                         const TypeDistribution& dist, Criterion criterion);

/// One-dimensional sweep of one manager's parameter, reporting the public
/// asset allocation alpha of that manager at each grid point.
struct SweepSpec {
    enum class Variable { RiskAversion, Theta };
    Criterion criterion = Criterion::ExponentialUtility;
    Variable variable = Variable::RiskAversion;
    double lo = 0.0;
    double hi = 1.0;
    int points = 100;
    std::vector<ManagerType> managers;
    MarketParams market{0.02, 1.0, 1.0};
    std::size_t manager = 0;
};

struct SweepRow {
    double x = 0.0;
    double alpha = 0.0;
};

std::vector<SweepRow> figure_sweep(const SweepSpec& spec);

/// The standard two-manager sweeps: risk-aversion sweeps for cases 1 and 3
/// and a competition-weight sweep for case 2, under both criteria.
struct NamedSweep {
    std::string name;
    std::string x_label;
    SweepSpec spec;
};

std::vector<NamedSweep> builtin_figure_sweeps();

bool strictly_increasing(const std::vector<SweepRow>& rows);
bool strictly_decreasing(const std::vector<SweepRow>& rows);

}  // namespace fundgames
