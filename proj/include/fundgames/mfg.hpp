#pragma once

#include "fundgames/equilibrium.hpp"
#include "fundgames/market.hpp"

#include <cstdint>
#include <vector>

namespace fundgames {

struct TypeAtom {
    ManagerType type;
    double weight;
};

/// Finite discrete type distribution. Weights are normalized at
/// construction; atoms must have theta < 1.
class TypeDistribution {
  public:
    explicit TypeDistribution(std::vector<TypeAtom> atoms);

    const std::vector<TypeAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    /// E[f(type)] over the atoms.
    template <typename F>
    double expectation(F f) const {
        double s = 0.0;
        for (const auto& a : atoms_) s += a.weight * f(a.type);
        return s;
    }

  private:
    std::vector<TypeAtom> atoms_;
};

/// L = E[delta/(1+delta)] / (1 - E[theta/(1+delta)]).
double aggregate_L(const TypeDistribution& dist);

/// R = E[1/(1+gamma)] / (1 - E[gamma theta/(1+gamma)]).
double aggregate_R(const TypeDistribution& dist);

/// Constant mean-field equilibrium strategy of a type under exponential
/// utility, given the population constant L.
ConstantStrategy mfe_exp(const ManagerType& mgr, const MarketParams& market, double big_l);

/// Constant time-consistent mean-field equilibrium strategy of a type under
/// the mean-variance criterion, given the population constant R.
ConstantStrategy mfe_mv(const ManagerType& mgr, const MarketParams& market, double big_r);

/// Per-atom MFE strategies plus the aggregate (L or R).
EquilibriumResult mfe_all(const TypeDistribution& dist, const MarketParams& market,
                          Criterion criterion);

/// Population-level aggregates of a per-atom strategy profile:
/// E[sigma~' pi] and E[drift].
struct MeanFieldAggregates {
    double mean_common = 0.0;
    double mean_drift = 0.0;
};
MeanFieldAggregates mfg_aggregates(const TypeDistribution& dist, const MarketParams& market,
                                   const std::vector<ConstantStrategy>& per_atom);

struct ConvergenceRow {
    std::size_t n = 0;
    double strategy_distance = 0.0;  // sup_i |pi_i(n) - pi_MFE(type_i)|_inf
    double aggregate_gap = 0.0;      // |D_n - L mu/sigma| or |K_n - R mu/sigma|
};

/// Samples n manager types i.i.d. from the distribution for each requested
/// size, solves the n-player game, and measures the distance to the per-type
/// MFE. Per-size RNG streams are derived from the seed, so sizes can be
/// evaluated in any order (or in parallel) with identical results.
std::vector<ConvergenceRow> convergence_study(const TypeDistribution& dist,
                                              const MarketParams& market,
                                              const std::vector<std::size_t>& sizes,
                                              std::uint64_t seed, Criterion criterion);

}  // namespace fundgames
