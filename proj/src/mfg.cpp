#include "fundgames/mfg.hpp"

#include "fundgames/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fundgames {

TypeDistribution::TypeDistribution(std::vector<TypeAtom> atoms) : atoms_(std::move(atoms)) {
    detail::require(!atoms_.empty(), "TypeDistribution: needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms_) {
        detail::require(a.weight > 0.0, "TypeDistribution: weights must be > 0");
        detail::require(a.type.theta < 1.0, "TypeDistribution: theta must lie in [0, 1)");
        total += a.weight;
    }
    for (auto& a : atoms_) a.weight /= total;
}

double aggregate_L(const TypeDistribution& dist) {
    const double num =
        dist.expectation([](const ManagerType& t) { return t.risk_aversion / (1.0 + t.risk_aversion); });
    const double den =
        1.0 - dist.expectation([](const ManagerType& t) { return t.theta / (1.0 + t.risk_aversion); });
    detail::require(den > 0.0, "aggregate_L: nonpositive denominator");
    return num / den;
}

double aggregate_R(const TypeDistribution& dist) {
    const double num =
        dist.expectation([](const ManagerType& t) { return 1.0 / (1.0 + t.risk_aversion); });
    const double den = 1.0 - dist.expectation([](const ManagerType& t) {
        return t.risk_aversion * t.theta / (1.0 + t.risk_aversion);
    });
    detail::require(den > 0.0, "aggregate_R: nonpositive denominator");
    return num / den;
}

ConstantStrategy mfe_exp(const ManagerType& mgr, const MarketParams& market, double big_l) {
    detail::require(mgr.theta < 1.0, "mfe_exp: theta must lie in [0, 1)");
    const double de = mgr.risk_aversion;
    const double cross = market.mu * mgr.asset.sigma_k - mgr.asset.mu_k * market.sigma;
    const double nu2 = mgr.asset.nu_k * mgr.asset.nu_k;
    const double s2 = market.sigma * market.sigma;
    const double alpha = de * mgr.asset.sigma_k * cross / ((1.0 + de) * s2 * nu2) +
                         (market.mu * de + mgr.theta * market.mu * big_l) / ((1.0 + de) * s2);
    const double beta = -de * cross / ((1.0 + de) * market.sigma * nu2);
    return {alpha, beta};
}

ConstantStrategy mfe_mv(const ManagerType& mgr, const MarketParams& market, double big_r) {
    detail::require(mgr.theta < 1.0, "mfe_mv: theta must lie in [0, 1)");
    const double ga = mgr.risk_aversion;
    const double cross = market.mu * mgr.asset.sigma_k - mgr.asset.mu_k * market.sigma;
    const double nu2 = mgr.asset.nu_k * mgr.asset.nu_k;
    const double s2 = market.sigma * market.sigma;
    // gamma theta load on the aggregate, as in the finite-player game.
    const double alpha = mgr.asset.sigma_k * cross / ((1.0 + ga) * s2 * nu2) +
                         (market.mu + ga * mgr.theta * market.mu * big_r) / ((1.0 + ga) * s2);
    const double beta = -cross / ((1.0 + ga) * market.sigma * nu2);
    return {alpha, beta};
}

EquilibriumResult mfe_all(const TypeDistribution& dist, const MarketParams& market,
                          Criterion criterion) {
    EquilibriumResult out;
    out.aggregate = (criterion == Criterion::ExponentialUtility) ? aggregate_L(dist)
                                                                 : aggregate_R(dist);
    out.strategies.reserve(dist.size());
    for (const auto& a : dist.atoms())
        out.strategies.push_back(criterion == Criterion::ExponentialUtility
                                     ? mfe_exp(a.type, market, out.aggregate)
                                     : mfe_mv(a.type, market, out.aggregate));
    return out;
}

MeanFieldAggregates mfg_aggregates(const TypeDistribution& dist, const MarketParams& market,
                                   const std::vector<ConstantStrategy>& per_atom) {
    detail::require(per_atom.size() == dist.size(), "mfg_aggregates: one strategy per atom");
    MeanFieldAggregates out;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const Exposure e = exposure(per_atom[i], market, dist.atoms()[i].type.asset);
        out.mean_common += dist.atoms()[i].weight * e.common;
        out.mean_drift += dist.atoms()[i].weight * e.drift;
    }
    return out;
}

namespace {

std::size_t sample_atom(const TypeDistribution& dist, std::mt19937_64& eng) {
    const double u = uniform01(eng);
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += dist.atoms()[i].weight;
        if (u < acc) return i;
    }
    return dist.size() - 1;
}

}  // namespace

std::vector<ConvergenceRow> convergence_study(const TypeDistribution& dist,
                                              const MarketParams& market,
                                              const std::vector<std::size_t>& sizes,
                                              std::uint64_t seed, Criterion criterion) {
    detail::require(!sizes.empty(), "convergence_study: sizes must be nonempty");

    const bool exp_game = criterion == Criterion::ExponentialUtility;
    const double limit_aggregate =
        (exp_game ? aggregate_L(dist) : aggregate_R(dist)) * market.sharpe();

    std::vector<ConvergenceRow> rows;
    rows.reserve(sizes.size());
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::size_t n = sizes[si];
        detail::require(n >= 1, "convergence_study: sizes must be >= 1");
        auto eng = make_engine(seed, si);

        std::vector<ManagerType> managers;
        std::vector<std::size_t> atom_of;
        managers.reserve(n);
        atom_of.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = sample_atom(dist, eng);
            atom_of.push_back(a);
            managers.push_back(dist.atoms()[a].type);
        }

        const Population pop(market, std::move(managers), criterion);
        const EquilibriumResult finite = exp_game ? equilibrium_exp(pop) : equilibrium_mv(pop);
        const EquilibriumResult limit = mfe_all(dist, market, criterion);

        double dist_sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const ConstantStrategy& lim = limit.strategies[atom_of[i]];
            dist_sup = std::max(dist_sup, std::abs(finite.strategies[i].alpha - lim.alpha));
            dist_sup = std::max(dist_sup, std::abs(finite.strategies[i].beta - lim.beta));
        }
        rows.push_back({n, dist_sup, std::abs(finite.aggregate - limit_aggregate)});
    }
    return rows;
}

}  // namespace fundgames
