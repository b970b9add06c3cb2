#include "fundgames/sensitivity.hpp"

#include "fundgames/equilibrium.hpp"

#include <cmath>

namespace fundgames {

CaseLabel classify_case(const MarketParams& market, const PrivateAsset& asset) {
    const double cross = market.mu * asset.sigma_k - asset.mu_k * market.sigma;
    if (asset.sigma_k == 0.0 || cross == 0.0) return CaseLabel::Boundary;
    if (asset.sigma_k < 0.0) return CaseLabel::Case3;
    return cross > 0.0 ? CaseLabel::Case1 : CaseLabel::Case2;
}

const char* to_string(CaseLabel label) {
    switch (label) {
        case CaseLabel::Case1: return "case1";
        case CaseLabel::Case2: return "case2";
        case CaseLabel::Case3: return "case3";
        default: return "boundary";
    }
}

StrategyPartials partials_exp(const Population& pop, std::size_t k) {
    detail::require(pop.criterion == Criterion::ExponentialUtility,
                    "partials_exp: exponential-utility population required");
    detail::require(k < pop.size(), "partials_exp: manager index out of range");

    const double n = static_cast<double>(pop.size());
    const MarketParams& mk = pop.market;
    const ManagerType& m = pop.managers[k];
    const double de = m.risk_aversion;
    const double th = m.theta;
    const double sk = m.asset.sigma_k;
    const double muk = m.asset.mu_k;
    const double nu2 = m.asset.nu_k * m.asset.nu_k;
    const double nu3 = nu2 * m.asset.nu_k;
    const double s = mk.sigma;
    const double mu = mk.mu;
    const double s2 = s * s;
    const double cross = mu * sk - muk * s;  // mu sigma_k - mu_k sigma
    const double den = 1.0 + de - th / n;

    double a_sum = 0.0, c_sum = 0.0;
    for (const auto& mm : pop.managers) {
        a_sum += mm.risk_aversion / (1.0 + mm.risk_aversion);
        c_sum += mm.theta / (1.0 + mm.risk_aversion);
    }
    const double a_avg = a_sum / n;
    const double one_minus_c = 1.0 - c_sum / n;
    const double big_d = a_avg * (mu / s) / one_minus_c;

    StrategyPartials p;
    p.dbeta_dtheta = -de * cross / (n * den * den * s * nu2);
    p.dbeta_dmu = -de * sk / (den * s * nu2);
    p.dbeta_dsigma = de * mu * sk / (den * s2 * nu2);
    p.dbeta_dmu_k = de / (den * nu2);
    p.dbeta_dsigma_k = -de * mu / (den * s * nu2);
    p.dbeta_dnu_k = 2.0 * de * cross / (den * s * nu3);
    p.dbeta_drisk = -(1.0 - th / n) * cross / (den * den * s * nu2);

    const double ratio = a_avg / one_minus_c;
    p.dalpha_dmu = de * sk * sk / (den * s2 * nu2) + de / ((1.0 + de) * s2) +
                   th * ratio / ((1.0 + de) * s2);
    p.dalpha_dsigma = (-2.0 * de * mu * sk * sk + de * muk * sk * s) / (den * s2 * s * nu2) -
                      2.0 * de * mu / ((1.0 + de) * s2 * s) -
                      2.0 * mu * th * ratio / ((1.0 + de) * s2 * s);
    p.dalpha_dmu_k = -de * sk / (den * s * nu2);
    p.dalpha_dsigma_k = de * (2.0 * mu * sk - muk * s) / (den * s2 * nu2);
    p.dalpha_dnu_k = -2.0 * de * sk * cross / (den * s2 * nu3);
    p.dalpha_dtheta = de * sk * cross / (n * den * den * s2 * nu2) +
                      mu * ratio / ((1.0 + de) * s2) +
                      mu * th * ratio / (n * (1.0 + de) * (1.0 + de) * s2 * one_minus_c);

    // Own risk-aversion effect, combining the private-hedge term, the
    // myopic term, and the feedback of delta_k through the aggregate D.
    p.dalpha_drisk = sk * cross * (1.0 - th / n) / (den * den * s2 * nu2) +
                     mu / ((1.0 + de) * (1.0 + de) * s2) +
                     th * mu * (one_minus_c - a_avg * th) /
                         (n * std::pow(1.0 + de, 3) * s2 * one_minus_c * one_minus_c) -
                     th * big_d / ((1.0 + de) * (1.0 + de) * s);

    p.dalpha_dtheta_all.resize(pop.size());
    p.dalpha_drisk_all.resize(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (i == k) {
            p.dalpha_dtheta_all[static_cast<Eigen::Index>(i)] = p.dalpha_dtheta;
            p.dalpha_drisk_all[static_cast<Eigen::Index>(i)] = p.dalpha_drisk;
            continue;
        }
        const double di = pop.managers[i].risk_aversion;
        const double ti = pop.managers[i].theta;
        const double head = th * mu / ((1.0 + de) * s2);
        p.dalpha_dtheta_all[static_cast<Eigen::Index>(i)] =
            head * a_avg / (one_minus_c * one_minus_c) / (n * (1.0 + di));
        p.dalpha_drisk_all[static_cast<Eigen::Index>(i)] =
            head * (one_minus_c - a_avg * ti) /
            (n * (1.0 + di) * (1.0 + di) * one_minus_c * one_minus_c);
    }
    return p;
}

StrategyPartials partials_mv(const Population& pop, std::size_t k) {
    detail::require(pop.criterion == Criterion::MeanVariance,
                    "partials_mv: mean-variance population required");
    detail::require(k < pop.size(), "partials_mv: manager index out of range");

    const double n = static_cast<double>(pop.size());
    const MarketParams& mk = pop.market;
    const ManagerType& m = pop.managers[k];
    const double ga = m.risk_aversion;
    const double th = m.theta;
    const double sk = m.asset.sigma_k;
    const double muk = m.asset.mu_k;
    const double nu2 = m.asset.nu_k * m.asset.nu_k;
    const double nu3 = nu2 * m.asset.nu_k;
    const double s = mk.sigma;
    const double mu = mk.mu;
    const double s2 = s * s;
    const double cross = mu * sk - muk * s;
    const double den = 1.0 + ga - ga * th / n;

    double p_sum = 0.0, q_sum = 0.0;
    for (const auto& mm : pop.managers) {
        p_sum += 1.0 / (1.0 + mm.risk_aversion);
        q_sum += mm.risk_aversion * mm.theta / (1.0 + mm.risk_aversion);
    }
    const double p_avg = p_sum / n;
    const double one_minus_q = 1.0 - q_sum / n;
    const double big_k = p_avg * (mu / s) / one_minus_q;

    StrategyPartials p;
    p.dbeta_dtheta = -ga * cross / (n * den * den * s * nu2);
    p.dbeta_dmu = -sk / (den * s * nu2);
    p.dbeta_dsigma = mu * sk / (den * s2 * nu2);
    p.dbeta_dmu_k = 1.0 / (den * nu2);
    p.dbeta_dsigma_k = -mu / (den * s * nu2);
    p.dbeta_dnu_k = 2.0 * cross / (den * s * nu3);
    p.dbeta_drisk = (1.0 - th / n) * cross / (den * den * s * nu2);

    // The aggregate K is loaded with gamma theta, so every K-sensitivity
    // below carries the extra gamma factor.
    const double ratio = p_avg / one_minus_q;
    p.dalpha_dmu = sk * sk / (den * s2 * nu2) + 1.0 / ((1.0 + ga) * s2) +
                   ga * th * ratio / ((1.0 + ga) * s2);
    p.dalpha_dsigma = (-2.0 * mu * sk * sk + muk * sk * s) / (den * s2 * s * nu2) -
                      2.0 * mu / ((1.0 + ga) * s2 * s) -
                      2.0 * mu * ga * th * ratio / ((1.0 + ga) * s2 * s);
    p.dalpha_dmu_k = -sk / (den * s * nu2);
    p.dalpha_dsigma_k = (2.0 * mu * sk - muk * s) / (den * s2 * nu2);
    p.dalpha_dnu_k = -2.0 * sk * cross / (den * s2 * nu3);
    p.dalpha_dtheta = ga * sk * cross / (n * den * den * s2 * nu2) +
                      ga * mu * ratio / ((1.0 + ga) * s2) +
                      ga * ga * mu * th * ratio /
                          (n * (1.0 + ga) * (1.0 + ga) * s2 * one_minus_q);

    p.dalpha_drisk = -sk * cross * (1.0 - th / n) / (den * den * s2 * nu2) +
                     th * s * big_k / ((1.0 + ga) * s2) -
                     (mu + ga * th * s * big_k) / ((1.0 + ga) * (1.0 + ga) * s2) -
                     ga * th * mu * (one_minus_q - p_avg * th) /
                         (n * std::pow(1.0 + ga, 3) * s2 * one_minus_q * one_minus_q);

    p.dalpha_dtheta_all.resize(pop.size());
    p.dalpha_drisk_all.resize(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (i == k) {
            p.dalpha_dtheta_all[static_cast<Eigen::Index>(i)] = p.dalpha_dtheta;
            p.dalpha_drisk_all[static_cast<Eigen::Index>(i)] = p.dalpha_drisk;
            continue;
        }
        const double gi = pop.managers[i].risk_aversion;
        const double ti = pop.managers[i].theta;
        const double head = ga * th * mu / ((1.0 + ga) * s2);
        p.dalpha_dtheta_all[static_cast<Eigen::Index>(i)] =
            head * p_avg / (one_minus_q * one_minus_q) * gi / (n * (1.0 + gi));
        p.dalpha_drisk_all[static_cast<Eigen::Index>(i)] =
            -head * (one_minus_q - p_avg * ti) /
            (n * (1.0 + gi) * (1.0 + gi) * one_minus_q * one_minus_q);
    }
    return p;
}

MfePartials partials_mfe(const ManagerType& mgr, const MarketParams& market,
                         const TypeDistribution& dist, Criterion criterion) {
    detail::require(mgr.theta < 1.0, "partials_mfe: theta must lie in [0, 1)");
    const double s2 = market.sigma * market.sigma;
    const double cross = market.mu * mgr.asset.sigma_k - mgr.asset.mu_k * market.sigma;
    const double hedge = mgr.asset.sigma_k * cross / (s2 * mgr.asset.nu_k * mgr.asset.nu_k);
    const double r = mgr.risk_aversion;

    MfePartials out;
    if (criterion == Criterion::ExponentialUtility) {
        const double big_l = aggregate_L(dist);
        out.dalpha_dtheta = market.mu * big_l / ((1.0 + r) * s2);
        out.dalpha_drisk =
            (hedge + market.mu * (1.0 - mgr.theta * big_l) / s2) / ((1.0 + r) * (1.0 + r));
    } else {
        const double big_r = aggregate_R(dist);
        out.dalpha_dtheta = r * market.mu * big_r / ((1.0 + r) * s2);
        out.dalpha_drisk =
            -(hedge + market.mu * (1.0 - mgr.theta * big_r) / s2) / ((1.0 + r) * (1.0 + r));
    }
    return out;
}

std::vector<SweepRow> figure_sweep(const SweepSpec& spec) {
    detail::require(spec.points >= 2, "figure_sweep: need at least 2 grid points");
    detail::require(spec.lo < spec.hi, "figure_sweep: need lo < hi");
    detail::require(!spec.managers.empty() && spec.manager < spec.managers.size(),
                    "figure_sweep: manager index out of range");

    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(spec.points));
    const double width = (spec.hi - spec.lo) / static_cast<double>(spec.points);
    for (int i = 0; i < spec.points; ++i) {
        // midpoints, staying inside the open interval (lo, hi)
        const double x = spec.lo + (static_cast<double>(i) + 0.5) * width;
        std::vector<ManagerType> managers = spec.managers;
        const ManagerType& base = managers[spec.manager];
        managers[spec.manager] =
            (spec.variable == SweepSpec::Variable::RiskAversion)
                ? ManagerType(x, base.theta, base.asset)
                : ManagerType(base.risk_aversion, x, base.asset);
        const Population pop(spec.market, std::move(managers), spec.criterion);
        const EquilibriumResult eq = (spec.criterion == Criterion::ExponentialUtility)
                                         ? equilibrium_exp(pop)
                                         : equilibrium_mv(pop);
        rows.push_back({x, eq.strategies[spec.manager].alpha});
    }
    return rows;
}

std::vector<NamedSweep> builtin_figure_sweeps() {
    const MarketParams market(0.02, 1.0, 1.0);
    const PrivateAsset case1_asset(2.0, 3.0, 3.0);
    const PrivateAsset case3_asset(2.0, -1.0, 1.0);

    const auto two_managers = [&](double risk1, double theta1, const PrivateAsset& asset1) {
        return std::vector<ManagerType>{ManagerType(risk1, theta1, asset1),
                                        ManagerType(5.0, 0.5, asset1)};
    };

    std::vector<NamedSweep> out;
    const auto add = [&](std::string name, std::string x_label, Criterion crit,
                         SweepSpec::Variable var, double lo, double hi, int points,
                         std::vector<ManagerType> managers) {
        SweepSpec spec;
        spec.criterion = crit;
        spec.variable = var;
        spec.lo = lo;
        spec.hi = hi;
        spec.points = points;
        spec.managers = std::move(managers);
        spec.market = market;
        spec.manager = 0;
        out.push_back({std::move(name), std::move(x_label), std::move(spec)});
    };

    using V = SweepSpec::Variable;
    add("exp_case1_risk", "delta_1", Criterion::ExponentialUtility, V::RiskAversion, 0.0, 20.0,
        200, two_managers(1.0, 0.5, case1_asset));
    add("exp_case3_risk", "delta_1", Criterion::ExponentialUtility, V::RiskAversion, 0.0, 20.0,
        200, two_managers(1.0, 0.5, case3_asset));
    add("exp_case2_theta", "theta_1", Criterion::ExponentialUtility, V::Theta, 0.0, 1.0, 99,
        two_managers(5.0, 0.5, PrivateAsset(3.0, 2.0, 2.0)));
    add("mv_case1_risk", "gamma_1", Criterion::MeanVariance, V::RiskAversion, 0.0, 20.0, 200,
        two_managers(1.0, 0.5, case1_asset));
    add("mv_case3_risk", "gamma_1", Criterion::MeanVariance, V::RiskAversion, 0.0, 20.0, 200,
        two_managers(1.0, 0.5, case3_asset));
    add("mv_case2_theta", "theta_1", Criterion::MeanVariance, V::Theta, 0.0, 1.0, 99,
        two_managers(5.0, 0.5, PrivateAsset(5.0, 2.0, 2.0)));
    return out;
}

bool strictly_increasing(const std::vector<SweepRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].alpha > rows[i - 1].alpha)) return false;
    return true;
}

bool strictly_decreasing(const std::vector<SweepRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].alpha < rows[i - 1].alpha)) return false;
    return true;
}

}  // namespace fundgames
