#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "voltide/skew_t.hpp"

namespace voltide::garch {

/// Parameters of the exponential GARCH(1,1) with AR(1) mean equation:
///   r_t = mu + phi r_{t-1} + sigma_t z_t,  z_t ~ standardized skew-t
///   ln sigma_t^2 = omega + beta ln sigma_{t-1}^2 + gamma z_{t-1}
///                  + alpha (|z_{t-1}| - E|z|)
struct EgarchParams {
    double mu = 0.0;
    double phi = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    dist::SkewTParams dist;
    double e_abs_z = 0.0;  ///< E|z| under dist, cached from quadrature
};

/// Filtered state: conditional volatility and standardized residual paths
/// starting at the second observation (the first observation conditions the
/// mean equation; its volatility is the sample-stddev warm-up).
struct FilterState {
    double sigma = 0.0;       ///< conditional volatility of the last observation
    double last_value = 0.0;  ///< last observed series value
    std::vector<double> residuals;
    std::vector<double> cond_vols;
};

struct EgarchModel {
    EgarchParams params;
    FilterState state;
    double log_likelihood = 0.0;
    bool converged = false;
};

/// Runs the volatility/residual recursion over the full series with fixed
/// parameters. sigma_0 is the unconditional sample stddev and z_0 = 0.
FilterState filter(const EgarchParams& params, std::span<const double> values);

/// Continues an existing filter over appended observations, in place.
void extend_filter(const EgarchParams& params, FilterState& state,
                   std::span<const double> new_values);

/// Conditional log-likelihood of the series under fixed parameters.
double log_likelihood(const EgarchParams& params, std::span<const double> values);

/// Maximum-likelihood fit via multi-start derivative-free simplex search
/// (one moment-based start plus four seeded jitters; bounds enforced by
/// parameter transforms). An optional warm start is prepended to the start
/// list with the jittered starts dropped, for cheap expanding-window refits.
/// Throws NumericError when the series is degenerate or no start converges.
EgarchModel fit_egarch(std::span<const double> values, std::uint64_t seed,
                       const std::optional<EgarchParams>& warm_start = std::nullopt);

struct OneStepForecast {
    double mean = 0.0;
    double sigma = 0.0;
};

/// Next-day mean and volatility from the current state.
OneStepForecast forecast_one_step(const EgarchParams& params, const FilterState& state);

/// Probability integral transform of a standardized residual and its inverse.
double pit(double z, const dist::SkewTParams& d);
double inverse_pit(double u, const dist::SkewTParams& d);

/// Simulates a series from the model (tests and synthetic fixtures).
std::vector<double> simulate(const EgarchParams& params, std::size_t n, std::uint64_t seed,
                             std::size_t burn_in = 200);

}  // namespace voltide::garch
