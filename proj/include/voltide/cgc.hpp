#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace voltide::cgc {

/// Configuration of one causality test.
struct CgcConfig {
    int horizon_lag = 1;           ///< conditioning/causing lag in days (1, 7 or 30)
    int n_bootstrap = 200;         ///< null replicates, >= 100
    double percentile = 0.95;      ///< rejection threshold on the null distribution
    int bernstein_degree = 0;      ///< 0 = automatic: ceil(T^(1/3)) clamped to [8, 20]
    double expected_block_len = 20.0;  ///< stationary-bootstrap mean block length
    std::uint64_t seed = 0;
};

struct CgcResult {
    std::string causer;
    std::string target;
    int horizon_lag = 1;
    double statistic = 0.0;
    std::vector<double> bootstrap_stats;
    double p_value = 1.0;
    bool below_resolution = false;  ///< observed statistic beat every replicate
    bool significant = false;

    /// p-value as reported: "<1/B" when no replicate reached the statistic.
    [[nodiscard]] std::string p_value_string() const;
};

/// Gaussian-kernel conditional CDF evaluated at the sample points with
/// self-exclusion:
///   U_t = sum_{s != t} w_s(cond_t) Phi((y_t - y_s)/h_y),
///   w_s(x) proportional to exp(-(cond_s - x)^2 / (2 h_x^2)).
/// Bandwidths follow Silverman's rule unless passed explicitly (> 0).
/// Throws NumericError on constant conditioning data or zero bandwidth.
std::vector<double> conditional_cdf_kde(std::span<const double> y, std::span<const double> cond,
                                        double bandwidth_y = 0.0, double bandwidth_cond = 0.0);

/// Silverman's rule-of-thumb bandwidth: 0.9 min(sd, IQR/1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> x);

/// Nonparametric copula density on the unit square: cell frequencies of the
/// degree x degree grid smoothed by the beta (Bernstein) basis. Integrates
/// to one exactly; non-negative everywhere.
class BernsteinCopulaDensity {
public:
    BernsteinCopulaDensity(std::span<const double> u, std::span<const double> v, int degree);

    [[nodiscard]] double operator()(double a, double b) const;
    [[nodiscard]] int degree() const { return degree_; }

private:
    int degree_;
    std::vector<double> theta_;       // cell frequencies, row-major [j*degree + k]
    std::vector<double> log_binom_;   // log C(degree-1, j)
};

/// Degree rule: ceil(T^(1/3)) clamped to [8, 20].
int bernstein_degree_for(std::size_t n);

/// Expected log copula density of (U, V) where U is the target's conditional
/// PIT given its lagged value and V is the lagged causer's conditional PIT
/// given the same conditioning value. Density floored at 1e-10 before logs.
double cgc_statistic(std::span<const double> target, std::span<const double> causer,
                     const CgcConfig& cfg);

/// Stationary block bootstrap resample indices (geometric block lengths with
/// the given expected length, wrap-around continuation).
std::vector<std::size_t> stationary_bootstrap_indices(std::size_t n, double expected_block_len,
                                                      std::uint64_t seed);

/// Full test: observed statistic, null distribution from block-bootstrap
/// resamples of the causer (target held fixed), p-value and significance.
/// Deterministic under a fixed cfg.seed at any parallelism level.
CgcResult bootstrap_cgc(std::span<const double> target, std::span<const double> causer,
                        const CgcConfig& cfg, const std::string& causer_name = "causer",
                        const std::string& target_name = "target");

}  // namespace voltide::cgc
