#include "fundgames/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fundgames {

double exp_payoff(const GaussianLaw& law, double delta) {
    detail::require(delta > 0.0, "exp_payoff: delta must be > 0");
    return -std::exp(-law.mean / delta + law.variance / (2.0 * delta * delta));
}

double mv_payoff(const GaussianLaw& law, double gamma) {
    detail::require(gamma > 0.0, "mv_payoff: gamma must be > 0");
    return law.mean - 0.5 * gamma * law.variance;
}

namespace {

void check_grid(const GridSpec& g) {
    detail::require(g.step > 0.0 && g.alpha_min <= g.alpha_max && g.beta_min <= g.beta_max,
                    "GridSpec: empty grid");
}

// Manager k's deviation objective with the rest of the profile folded into
// constants, so one grid cell costs a handful of flops. score() is the
// payoff per unit time, log-transformed for the exponential criterion; both
// transforms are quadratic in (alpha, beta) and rank deviations identically
// to the horizon-T payoff.
struct DeviationObjective {
    // market and own-asset coefficients
    double kappa, mu, sigma, mu_k, sigma_k, nu_k;
    // own weight 1 - theta_k/n and the others' weighted aggregates
    double w_own = 1.0;
    double peers_drift = 0.0;   // sum_{i != k} w_i drift_i
    double peers_common = 0.0;  // sum_{i != k} w_i common_i
    double peers_idio2 = 0.0;   // sum_{i != k} w_i^2 idio_i^2
    Criterion criterion = Criterion::ExponentialUtility;
    double risk_aversion = 1.0;

    DeviationObjective(const Population& pop, const std::vector<ConstantStrategy>& strategies,
                       std::size_t k)
        : kappa(pop.market.kappa),
          mu(pop.market.mu),
          sigma(pop.market.sigma),
          mu_k(pop.managers[k].asset.mu_k),
          sigma_k(pop.managers[k].asset.sigma_k),
          nu_k(pop.managers[k].asset.nu_k),
          criterion(pop.criterion),
          risk_aversion(pop.managers[k].risk_aversion) {
        const std::size_t n = pop.size();
        const double wk = pop.managers[k].theta / static_cast<double>(n);
        w_own = 1.0 - wk;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const Exposure e = exposure(strategies[i], pop.market, pop.managers[i].asset);
            peers_drift += -wk * e.drift;
            peers_common += -wk * e.common;
            peers_idio2 += wk * wk * e.idio * e.idio;
        }
    }

    void moments(double alpha, double beta, double& mean_rate, double& var_rate) const {
        const double c = sigma * alpha + sigma_k * beta;
        const double d = nu_k * beta;
        const double drift = kappa + mu * alpha + mu_k * beta - 0.5 * c * c - 0.5 * d * d;
        mean_rate = w_own * drift + peers_drift;
        const double cc = w_own * c + peers_common;
        var_rate = cc * cc + w_own * w_own * d * d + peers_idio2;
    }

    double score(double alpha, double beta) const {
        double m, v;
        moments(alpha, beta, m, v);
        if (criterion == Criterion::ExponentialUtility)
            return m / risk_aversion - v / (2.0 * risk_aversion * risk_aversion);
        return m - 0.5 * risk_aversion * v;
    }
};

struct BestCell {
    double score = -std::numeric_limits<double>::infinity();
    double alpha = 0.0;
    double beta = 0.0;

    void offer(double s, double a, double b) {
        if (s > score || (s == score && (a < alpha || (a == alpha && b < beta)))) {
            score = s;
            alpha = a;
            beta = b;
        }
    }
};

}  // namespace

DeviationResult deviation_scan(const Population& pop,
                               const std::vector<ConstantStrategy>& strategies, std::size_t k,
                               const GridSpec& grid, double horizon) {
    detail::require(strategies.size() == pop.size(), "deviation_scan: one strategy per manager");
    detail::require(k < pop.size(), "deviation_scan: manager index out of range");
    detail::require(horizon > 0.0, "deviation_scan: horizon must be > 0");
    check_grid(grid);

    const DeviationObjective obj(pop, strategies, k);
    const auto count = [&](double lo, double hi) {
        return static_cast<long>(std::floor((hi - lo) / grid.step + 1e-9)) + 1;
    };
    const long na = count(grid.alpha_min, grid.alpha_max);
    const long nb = count(grid.beta_min, grid.beta_max);

    BestCell best;
#pragma omp parallel if (na * nb > 16384)
    {
        BestCell local;
#pragma omp for nowait
        for (long ia = 0; ia < na; ++ia) {
            const double a = grid.alpha_min + static_cast<double>(ia) * grid.step;
            for (long ib = 0; ib < nb; ++ib) {
                const double b = grid.beta_min + static_cast<double>(ib) * grid.step;
                local.offer(obj.score(a, b), a, b);
            }
        }
#pragma omp critical
        best.offer(local.score, local.alpha, local.beta);
    }

    const auto score_fn = [&obj](const ConstantStrategy& s) { return obj.score(s.alpha, s.beta); };
    ConstantStrategy polished =
        quadratic_polish(ConstantStrategy(best.alpha, best.beta), grid.step, score_fn);
    double best_score = score_fn(polished);
    if (best_score < best.score) {
        polished = ConstantStrategy(best.alpha, best.beta);
        best_score = best.score;
    }

    const double candidate_score = obj.score(strategies[k].alpha, strategies[k].beta);
    DeviationResult out;
    out.best_deviation = polished;
    out.score_gain = horizon * (best_score - candidate_score);
    if (pop.criterion == Criterion::ExponentialUtility) {
        // payoff difference exp(-T q_cand) - exp(-T q_best), written so a
        // near-zero gain never cancels
        const double rel = -std::expm1(-out.score_gain);
        out.improvement = rel == 0.0 ? 0.0 : std::exp(-horizon * candidate_score) * rel;
    } else {
        out.improvement = out.score_gain;
    }
    return out;
}

ScanOutcome grid_maximize(const GridSpec& grid,
                          const std::function<double(const ConstantStrategy&)>& score) {
    check_grid(grid);
    const auto count = [&](double lo, double hi) {
        return static_cast<long>(std::floor((hi - lo) / grid.step + 1e-9)) + 1;
    };
    BestCell best;
    const long na = count(grid.alpha_min, grid.alpha_max);
    const long nb = count(grid.beta_min, grid.beta_max);
    for (long ia = 0; ia < na; ++ia) {
        const double a = grid.alpha_min + static_cast<double>(ia) * grid.step;
        for (long ib = 0; ib < nb; ++ib) {
            const double b = grid.beta_min + static_cast<double>(ib) * grid.step;
            best.offer(score(ConstantStrategy(a, b)), a, b);
        }
    }
    return {ConstantStrategy(best.alpha, best.beta), best.score};
}

ConstantStrategy quadratic_polish(const ConstantStrategy& start, double h,
                                  const std::function<double(const ConstantStrategy&)>& score) {
    detail::require(h > 0.0, "quadratic_polish: stencil width must be > 0");
    const double x = start.alpha, y = start.beta;
    const auto f = [&](double a, double b) { return score(ConstantStrategy(a, b)); };

    const double f0 = f(x, y);
    const double fpx = f(x + h, y), fmx = f(x - h, y);
    const double fpy = f(x, y + h), fmy = f(x, y - h);
    const double gx = (fpx - fmx) / (2.0 * h);
    const double gy = (fpy - fmy) / (2.0 * h);
    const double hxx = (fpx - 2.0 * f0 + fmx) / (h * h);
    const double hyy = (fpy - 2.0 * f0 + fmy) / (h * h);
    const double hxy =
        (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);

    const double det = hxx * hyy - hxy * hxy;
    if (!(hxx < 0.0) || !(det > 0.0)) return start;
    const double dx = (hyy * gx - hxy * gy) / det;
    const double dy = (hxx * gy - hxy * gx) / det;
    return {x - dx, y - dy};
}

}  // namespace fundgames
