#pragma once

#include "fundgames/market.hpp"

#include <functional>

namespace fundgames {

/// E[-exp(-Z/delta)] for Gaussian Z: -exp(-mean/delta + variance/(2 delta^2)).
double exp_payoff(const GaussianLaw& law, double delta);

/// mean - (gamma/2) variance.
double mv_payoff(const GaussianLaw& law, double gamma);

/// Rectangular search grid over (alpha, beta).
struct GridSpec {
    double alpha_min = -10.0;
    double alpha_max = 10.0;
    double beta_min = -10.0;
    double beta_max = 10.0;
    double step = 0.05;
};

struct DeviationResult {
    ConstantStrategy best_deviation;
    /// Payoff gain of the best deviation over the candidate, on the payoff
    /// scale. Computed through expm1, but still overflows to infinity when
    /// the candidate payoff itself exceeds the double range.
    double improvement = 0.0;
    /// Gain on the transformed (log-domain for exponential utility) payoff
    /// scale over the horizon; finite even when improvement is not.
    double score_gain = 0.0;
};

/// Scans manager k's unilateral constant deviations over the grid (others
/// held fixed), then applies one Newton polish step at the best grid point.
/// The scored objective is exactly quadratic in the deviation (after a log
/// transform in the exponential case), so the polish lands on the true
/// maximizer. improvement is best payoff minus the candidate's payoff.
DeviationResult deviation_scan(const Population& pop,
                               const std::vector<ConstantStrategy>& strategies, std::size_t k,
                               const GridSpec& grid, double horizon = 1.0);

/// Grid maximization of an arbitrary score with lexicographic (alpha, beta)
/// tie-breaking; evaluation order never changes the result.
struct ScanOutcome {
    ConstantStrategy best;
    double score = 0.0;
};
ScanOutcome grid_maximize(const GridSpec& grid,
                          const std::function<double(const ConstantStrategy&)>& score);

/// One Newton step on a concave quadratic score using central differences
/// with stencil width h (exact for quadratics). Returns the start point if
/// the estimated Hessian is not negative definite.
ConstantStrategy quadratic_polish(const ConstantStrategy& start, double h,
                                  const std::function<double(const ConstantStrategy&)>& score);

}  // namespace fundgames
