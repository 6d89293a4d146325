#pragma once

namespace voltide::dist {

/// Skewed Student-t shock law: a symmetric Student-t skewed by the
/// two-piece scale mechanism (multiplicative skew parameter xi), then
/// shifted/scaled so the resulting law has zero mean and unit variance.
/// mu_dist and sigma_dist are the standardization constants of the
/// pre-standardized skewed law.
struct SkewTParams {
    double nu = 8.0;          ///< degrees of freedom, > 2
    double xi = 1.0;          ///< skewness, > 0; xi = 1 recovers the symmetric t
    double mu_dist = 0.0;     ///< mean of the raw skewed law
    double sigma_dist = 1.0;  ///< standard deviation of the raw skewed law
};

/// Builds SkewTParams with the standardization constants filled in.
/// Throws NumericError unless nu > 2 and xi > 0.
SkewTParams make_skew_t(double nu, double xi);

double skewt_pdf(double x, const SkewTParams& p);
double skewt_log_pdf(double x, const SkewTParams& p);
double skewt_cdf(double x, const SkewTParams& p);

/// Exact inverse of skewt_cdf. Throws NumericError unless u in (0,1).
double skewt_quantile(double u, const SkewTParams& p);

/// E|Z| under the standardized law, by adaptive quadrature.
double skewt_mean_abs(const SkewTParams& p);

}  // namespace voltide::dist
