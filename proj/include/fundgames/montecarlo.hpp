#pragma once

#include "fundgames/market.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace fundgames {

enum class Scheme { Euler, Exact };

struct SimConfig {
    double horizon = 1.0;
    int steps = 1;
    long paths = 1;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::Exact;
};

struct PayoffEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct SimResult {
    Eigen::MatrixXd returns;  // paths x n terminal log-returns
    std::vector<PayoffEstimate> payoffs;
};

/// Simulates the coupled log-return dynamics under constant strategies.
///
/// Exact scheme: draws the terminal Gaussians directly (the log-returns have
/// constant coefficients, so the terminal law is known in closed form).
/// Euler scheme: Euler-Maruyama on the wealth dynamics, accumulating the log
/// of each per-step growth factor, which avoids overflow for aggressive
/// strategies and carries the usual weak order-1 discretization bias.
///
/// Randomness: one stream per (path, shock source), shock source 0 being the
/// common shock and k the k-th manager's idiosyncratic shock, each seeded by
/// derive_seed(cfg.seed, path, source). Results are reproducible and do not
/// depend on how paths are partitioned across workers.
SimResult simulate(const Population& pop, const std::vector<ConstantStrategy>& strategies,
                   const SimConfig& cfg);

/// Payoff estimate for manager k from a simulated return matrix. theta is
/// the manager's competition weight; Z = R^k - (theta/n) sum_i R^i per path.
/// Exponential: sample mean of -exp(-Z/risk_aversion). Mean-variance: sample
/// mean minus (risk_aversion/2) times the unbiased sample variance, with a
/// delta-method standard error (needs at least two paths).
PayoffEstimate mc_payoff(const SimResult& result, std::size_t k, Criterion criterion,
                         double risk_aversion, double theta);

/// Estimated mean gap between the Euler scheme and the exact terminal
/// log-return built from the same Brownian increments, per manager. The
/// pathwise coupling cancels the Monte Carlo noise, leaving the Euler
/// discretization bias measurable at modest path counts.
std::vector<PayoffEstimate> euler_discretization_gap(const Population& pop,
                                                     const std::vector<ConstantStrategy>& strategies,
                                                     const SimConfig& cfg);

}  // namespace fundgames
