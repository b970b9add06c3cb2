#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fundgames/equilibrium.hpp"
#include "fundgames/montecarlo.hpp"
#include "fundgames/payoff.hpp"

#include <cmath>

using namespace fundgames;

namespace {

const MarketParams kMarket(0.02, 1.0, 1.0);
const PrivateAsset kAsset(2.0, 3.0, 3.0);

Population s1_population(Criterion crit = Criterion::ExponentialUtility) {
    const ManagerType mgr(1.0, 0.5, kAsset);
    return Population(kMarket, {mgr, mgr}, crit);
}

}  // namespace

TEST_CASE("config validation") {
    const Population pop = s1_population();
    const std::vector<ConstantStrategy> zeros(2);
    CHECK_THROWS_AS(simulate(pop, zeros, {0.0, 1, 10, 1, Scheme::Exact}), std::invalid_argument);
    CHECK_THROWS_AS(simulate(pop, zeros, {1.0, 0, 10, 1, Scheme::Exact}), std::invalid_argument);
    CHECK_THROWS_AS(simulate(pop, zeros, {1.0, 1, 0, 1, Scheme::Exact}), std::invalid_argument);
    CHECK_THROWS_AS(simulate(pop, {zeros[0]}, {1.0, 1, 10, 1, Scheme::Exact}),
                    std::invalid_argument);
}

TEST_CASE("all-cash strategies are deterministic") {
    const Population pop = s1_population();
    const std::vector<ConstantStrategy> zeros(2);

    SUBCASE("exact scheme hits kappa T exactly") {
        const SimResult res = simulate(pop, zeros, {2.0, 1, 64, 9, Scheme::Exact});
        for (Eigen::Index p = 0; p < res.returns.rows(); ++p)
            for (Eigen::Index k = 0; k < res.returns.cols(); ++k)
                CHECK(res.returns(p, k) == doctest::Approx(0.04).epsilon(1e-15));
    }
    SUBCASE("euler scheme compounds the per-step growth") {
        const int steps = 16;
        const SimResult res = simulate(pop, zeros, {1.0, steps, 32, 9, Scheme::Euler});
        const double want = steps * std::log1p(0.02 / steps);
        for (Eigen::Index p = 0; p < res.returns.rows(); ++p)
            for (Eigen::Index k = 0; k < res.returns.cols(); ++k)
                CHECK(res.returns(p, k) == doctest::Approx(want).epsilon(1e-14));
        CHECK(std::abs(want - 0.02) <= 0.02 * 0.02 / steps);
    }
}

TEST_CASE("same seed reproduces the path matrix bit for bit") {
    const Population pop = s1_population();
    const EquilibriumResult eq = equilibrium_exp(pop);
    for (const Scheme scheme : {Scheme::Exact, Scheme::Euler}) {
        const SimConfig cfg{1.0, 8, 500, 77, scheme};
        const SimResult a = simulate(pop, eq.strategies, cfg);
        const SimResult b = simulate(pop, eq.strategies, cfg);
        CHECK((a.returns.array() == b.returns.array()).all());
        const SimResult c = simulate(pop, eq.strategies, {1.0, 8, 500, 78, scheme});
        CHECK_FALSE((a.returns.array() == c.returns.array()).all());
    }
}

TEST_CASE("exact scheme matches the return laws within sampling error") {
    const Population pop = s1_population();
    const std::vector<ConstantStrategy> profile{{0.8, -0.1}, {0.2, 0.3}};
    const long paths = 100000;
    const SimResult res = simulate(pop, profile, {1.0, 1, paths, 4242, Scheme::Exact});

    for (std::size_t k = 0; k < 2; ++k) {
        const GaussianLaw law = return_law(profile[k], kMarket, kAsset);
        const auto col = res.returns.col(static_cast<Eigen::Index>(k));
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / (paths - 1);
        const double se_mean = std::sqrt(law.variance / paths);
        const double se_var = law.variance * std::sqrt(2.0 / paths);
        CHECK(std::abs(mean - law.mean) <= 4.0 * se_mean);
        CHECK(std::abs(var - law.variance) <= 4.0 * se_var);
    }

    SUBCASE("cross-manager correlation comes from the shared shock only") {
        const Exposure e0 = exposure(profile[0], kMarket, kAsset);
        const Exposure e1 = exposure(profile[1], kMarket, kAsset);
        const double want = e0.common * e1.common /
                            std::sqrt((e0.common * e0.common + e0.idio * e0.idio) *
                                      (e1.common * e1.common + e1.idio * e1.idio));
        const auto a = res.returns.col(0).array() - res.returns.col(0).mean();
        const auto b = res.returns.col(1).array() - res.returns.col(1).mean();
        const double corr = (a * b).sum() / std::sqrt(a.square().sum() * b.square().sum());
        CHECK(std::abs(corr - want) <= 0.01);
    }
}

TEST_CASE("equilibrium payoff estimates match the closed forms") {
    const Population pop = s1_population();
    const EquilibriumResult eq = equilibrium_exp(pop);
    const long paths = 100000;
    const SimResult res = simulate(pop, eq.strategies, {1.0, 1, paths, 42, Scheme::Exact});

    const GaussianLaw law = excess_law_nplayer(pop, eq.strategies, 0);

    SUBCASE("excess return moments") {
        const Eigen::VectorXd z = res.returns.col(0) - 0.25 * res.returns.rowwise().sum();
        const double mean = z.mean();
        const double var = (z.array() - mean).square().sum() / (paths - 1);
        CHECK(std::abs(mean - law.mean) <= 3.0 * std::sqrt(law.variance / paths));
        CHECK(std::abs(var - law.variance) <= 3.0 * law.variance * std::sqrt(2.0 / paths));
    }
    SUBCASE("exponential payoff") {
        const double want = exp_payoff(law, 1.0);
        CHECK(std::abs(res.payoffs[0].value - want) <= 3.0 * res.payoffs[0].std_error);
        CHECK(res.payoffs[0].std_error > 0.0);
    }
    SUBCASE("mean-variance payoff of the same profile") {
        const PayoffEstimate est = mc_payoff(res, 0, Criterion::MeanVariance, 1.0, 0.5);
        const double want = mv_payoff(law, 1.0);  // 0.188005 on this instance
        CHECK(std::abs(est.value - want) <= 3.0 * est.std_error);
    }
}

TEST_CASE("mc_payoff edge cases") {
    const Population solo(kMarket, {ManagerType(1.0, 1.0, kAsset)}, Criterion::ExponentialUtility);
    const SimResult res = simulate(solo, {{0.0, 0.0}}, {1.0, 1, 50, 3, Scheme::Exact});
    // theta = 1, n = 1: the manager benchmarks itself, Z is identically zero
    const PayoffEstimate est = mc_payoff(res, 0, Criterion::ExponentialUtility, 1.0, 1.0);
    CHECK(est.value == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(est.std_error <= 1e-15);

    SimResult tiny;
    tiny.returns.resize(1, 1);
    tiny.returns(0, 0) = 0.1;
    CHECK_THROWS_AS(mc_payoff(tiny, 0, Criterion::MeanVariance, 1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_payoff(tiny, 1, Criterion::ExponentialUtility, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("euler bias shrinks as the step count grows") {
    const Population pop = s1_population();
    const EquilibriumResult eq = equilibrium_exp(pop);

    double bias16 = 0.0, bias256 = 0.0;
    for (const int steps : {16, 256}) {
        const auto gaps = euler_discretization_gap(pop, eq.strategies, {1.0, steps, 20000, 5,
                                                                        Scheme::Euler});
        // the coupling keeps the standard error well under the bias itself
        CHECK(gaps[0].std_error < std::abs(gaps[0].value));
        (steps == 16 ? bias16 : bias256) = gaps[0].value;
    }
    CHECK(std::abs(bias256) < std::abs(bias16));
    CHECK(std::abs(bias256) < 1e-3);
}
