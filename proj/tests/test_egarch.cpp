#include <cmath>
#include <vector>

#include "doctest.h"
#include "voltide/egarch.hpp"
#include "voltide/errors.hpp"
#include "voltide/rng.hpp"
#include "voltide/stats.hpp"

using namespace voltide;

namespace {

garch::EgarchParams reference_params() {
    garch::EgarchParams p;
    p.mu = 0.0;
    p.phi = 0.10;
    p.omega = -0.10;
    p.alpha = 0.20;
    p.beta = 0.95;
    p.gamma = -0.05;
    p.dist = dist::make_skew_t(6.0, 0.9);
    p.e_abs_z = dist::skewt_mean_abs(p.dist);
    return p;
}

}  // namespace

TEST_CASE("pit is the shock-law cdf and inverts exactly") {
    const auto d = dist::make_skew_t(7.0, 1.0);
    CHECK(garch::pit(0.0, d) == doctest::Approx(0.5).epsilon(1e-12));
    const auto skewed = dist::make_skew_t(5.0, 1.3);
    for (double z : {-2.5, -0.7, 0.0, 0.4, 3.1}) {
        CHECK(garch::inverse_pit(garch::pit(z, skewed), skewed) ==
              doctest::Approx(z).epsilon(1e-9));
    }
    CHECK_THROWS_AS(garch::inverse_pit(0.0, d), NumericError);
    CHECK_THROWS_AS(garch::inverse_pit(1.0, d), NumericError);
}

TEST_CASE("pit of true-law residuals is uniform") {
    const auto d = dist::make_skew_t(6.0, 0.85);
    rng::Rng gen(rng::derive_seed(5, "test:pit-uniform"));
    std::vector<double> u(5000);
    for (double& v : u) {
        const double z = dist::skewt_quantile(gen.uniform(), d);
        v = garch::pit(z, d);
    }
    CHECK(stats::ks_test_uniform(u).p_value > 0.01);
}

TEST_CASE("one-step forecast collapses to constants when dynamics are off") {
    garch::EgarchParams p;
    p.mu = 0.3;
    p.phi = 0.0;
    p.omega = -6.0;
    p.alpha = 0.0;
    p.beta = 0.0;
    p.gamma = 0.0;
    p.dist = dist::make_skew_t(8.0, 1.0);
    p.e_abs_z = dist::skewt_mean_abs(p.dist);

    garch::FilterState state;
    state.sigma = 0.5;
    state.last_value = 42.0;
    state.residuals = {1.7};
    state.cond_vols = {0.5};

    const auto f = garch::forecast_one_step(p, state);
    CHECK(f.sigma == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
    CHECK(f.mean == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("one-step forecast matches direct recursion arithmetic") {
    auto p = reference_params();
    garch::FilterState state;
    state.sigma = 0.02;
    state.last_value = 0.01;
    state.residuals = {1.0};
    state.cond_vols = {0.02};

    const auto f = garch::forecast_one_step(p, state);
    const double expected_ln_sig2 = p.omega + p.beta * std::log(0.02 * 0.02) + p.gamma * 1.0 +
                                    p.alpha * (1.0 - p.e_abs_z);
    CHECK(f.sigma == doctest::Approx(std::exp(0.5 * expected_ln_sig2)).epsilon(1e-12));
    CHECK(f.mean == doctest::Approx(p.mu + p.phi * 0.01).epsilon(1e-12));
}

TEST_CASE("filter residuals satisfy the defining identity") {
    const auto p = reference_params();
    const auto x = garch::simulate(p, 400, rng::derive_seed(5, "test:filter-identity"));
    const auto state = garch::filter(p, x);
    REQUIRE(state.residuals.size() == x.size() - 1);
    for (std::size_t t = 1; t < x.size(); ++t) {
        const double z = state.residuals[t - 1];
        const double sigma = state.cond_vols[t - 1];
        CHECK(z * sigma == doctest::Approx(x[t] - p.mu - p.phi * x[t - 1]).epsilon(1e-12));
        CHECK(sigma > 0.0);
    }
}

TEST_CASE("extend_filter reproduces the remainder of an in-one-go filter") {
    const auto p = reference_params();
    const auto x = garch::simulate(p, 500, rng::derive_seed(5, "test:filter-extend"));
    const auto full = garch::filter(p, x);

    const std::span<const double> head(x.data(), 300);
    auto state = garch::filter(p, head);
    garch::extend_filter(p, state, std::span<const double>(x.data() + 300, x.size() - 300));
    REQUIRE(state.residuals.size() == full.residuals.size());
    // Warm-up volatility differs (different sample stddev), but beta decays
    // the difference geometrically; the tails must agree tightly.
    for (std::size_t i = full.residuals.size() - 50; i < full.residuals.size(); ++i) {
        CHECK(state.residuals[i] == doctest::Approx(full.residuals[i]).epsilon(1e-6));
    }
    CHECK(state.last_value == full.last_value);
}

TEST_CASE("constant series is a degenerate-input error") {
    const std::vector<double> c(400, 1.0);
    CHECK_THROWS_AS(garch::fit_egarch(c, 1), NumericError);
    CHECK_THROWS_AS(garch::fit_egarch(std::vector<double>(100, 0.5), 1), NumericError);
}

TEST_CASE("simulate-then-fit recovers parameters and beats the truth in likelihood") {
    const auto truth = reference_params();
    const auto x = garch::simulate(truth, 3000, rng::derive_seed(5, "test:fit-recover"));
    const auto model = garch::fit_egarch(x, rng::derive_seed(5, "test:fit-seed"));
    CHECK(model.converged);

    // MLE dominates the true parameters on the same sample.
    const double ll_truth = garch::log_likelihood(truth, x);
    CHECK(model.log_likelihood >= ll_truth - 1e-6);

    // Loose single-seed recovery; the spec-scale recovery study lives in the
    // acceptance suite.
    CHECK(std::abs(model.params.beta - truth.beta) < 0.08);
    CHECK(std::abs(model.params.phi - truth.phi) < 0.08);
    CHECK(std::abs(model.params.alpha - truth.alpha) < 0.10);
    CHECK(std::abs(model.params.mu - truth.mu) < 0.05);

    // Correct specification leaves no serial correlation in residuals.
    const double rho = stats::autocorrelation(model.state.residuals, 1);
    CHECK(std::abs(rho) < 2.0 / std::sqrt(static_cast<double>(x.size())));
}

TEST_CASE("shifting the series shifts mu by (1-phi)c and keeps the volatility path") {
    const auto truth = reference_params();
    const auto x = garch::simulate(truth, 1200, rng::derive_seed(5, "test:fit-shift"));
    const double c = 5.0;
    std::vector<double> shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + c;

    const auto base = garch::fit_egarch(x, 99);

    // Likelihood identity: re-centering mu by (1-phi)c reproduces the fit
    // likelihood on shifted data exactly.
    auto moved = base.params;
    moved.mu = base.params.mu + (1.0 - base.params.phi) * c;
    CHECK(garch::log_likelihood(moved, shifted) ==
          doctest::Approx(base.log_likelihood).epsilon(1e-9));

    // Refitting from scratch lands on the equivariant optimum.
    const auto refit = garch::fit_egarch(shifted, 99);
    CHECK(refit.params.mu - (1.0 - refit.params.phi) * c ==
          doctest::Approx(base.params.mu - (1.0 - base.params.phi) * 0.0).epsilon(0.02));
    REQUIRE(refit.state.cond_vols.size() == base.state.cond_vols.size());
    for (std::size_t i = 0; i < base.state.cond_vols.size(); i += 37) {
        CHECK(refit.state.cond_vols[i] ==
              doctest::Approx(base.state.cond_vols[i]).epsilon(5e-3));
    }
}

TEST_CASE("warm started refit matches a cold fit closely and runs fewer starts") {
    const auto truth = reference_params();
    const auto x = garch::simulate(truth, 900, rng::derive_seed(5, "test:fit-warm"));
    const auto cold = garch::fit_egarch(x, 7);
    const auto warm = garch::fit_egarch(x, 7, cold.params);
    CHECK(warm.log_likelihood == doctest::Approx(cold.log_likelihood).epsilon(1e-7));
}
