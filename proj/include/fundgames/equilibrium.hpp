#pragma once

#include "fundgames/market.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fundgames {

/// A full strategy profile together with the population aggregate
/// (1/n) sum_i sigma~_i' pi_i (D for exponential games, K for mean-variance).
struct EquilibriumResult {
    std::vector<ConstantStrategy> strategies;
    double aggregate = 0.0;
};

/// Outcome of best-response iteration. On non-convergence the last iterate
/// and its residual are still populated.
struct FixedPointResult {
    std::vector<ConstantStrategy> strategies;
    double aggregate = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// --- exponential-utility n-player game ---

/// Aggregate D = [(1/n) sum delta_i/(1+delta_i)] (mu/sigma) / [1 - (1/n) sum theta_i/(1+delta_i)].
double aggregate_D(const Population& pop);

/// Unique constant equilibrium of the exponential-utility game.
EquilibriumResult equilibrium_exp(const Population& pop);

/// Best response of manager k to the other managers' constant strategies
/// (`others` lists all i != k in population order). Solves
/// (1 + delta_k - theta_k/n) M pi = delta_k mu~_k + theta_k B sigma~_k,
/// where B = (1/n) sum_{i != k} sigma~_i' pi_i and M is the return Gram matrix.
ConstantStrategy best_response_exp(const Population& pop,
                                   const std::vector<ConstantStrategy>& others, std::size_t k);

/// Synchronous best-response iteration until the sup-norm change drops
/// below tol; halves the step whenever the residual grows.
FixedPointResult fixed_point_exp(const Population& pop, const std::vector<ConstantStrategy>& init,
                                 double tol = 1e-12, int max_iter = 10000);

// --- mean-variance n-player game (time-consistent) ---

/// Aggregate K = [(1/n) sum 1/(1+gamma_i)] (mu/sigma) / [1 - (1/n) sum gamma_i theta_i/(1+gamma_i)].
double aggregate_K(const Population& pop);

/// Unique constant time-consistent equilibrium of the mean-variance game.
EquilibriumResult equilibrium_mv(const Population& pop);

/// Best response of manager k under the local mean-variance objective:
/// (1 + gamma_k - gamma_k theta_k/n) M pi = mu~_k + gamma_k theta_k B sigma~_k.
ConstantStrategy best_response_mv(const Population& pop,
                                  const std::vector<ConstantStrategy>& others, std::size_t k);

FixedPointResult fixed_point_mv(const Population& pop, const std::vector<ConstantStrategy>& init,
                                double tol = 1e-12, int max_iter = 10000);

/// First-order-condition residual of manager k's local mean-variance
/// objective at the given profile; zero (up to rounding) at the
/// time-consistent equilibrium, at every time, since constant strategies
/// make the objective time-invariant.
Eigen::Vector2d mv_first_order_residual(const Population& pop,
                                        const std::vector<ConstantStrategy>& strategies,
                                        std::size_t k);

}  // namespace fundgames
