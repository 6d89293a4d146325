#pragma once

#include <span>
#include <vector>

namespace voltide::stats {

double mean(std::span<const double> x);

/// Sample variance with 1/(n-1) normalization.
double variance(std::span<const double> x);
double stddev(std::span<const double> x);

/// Population variance with 1/n normalization.
double population_variance(std::span<const double> x);
double population_stddev(std::span<const double> x);

/// Empirical quantile with linear interpolation between order statistics
/// (h = p*(n-1) convention). `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);

/// Convenience overload that sorts a copy.
double quantile(std::span<const double> x, double p);

/// Interquartile range (linear-interpolation quantiles).
double iqr(std::span<const double> x);

/// Lag-k sample autocorrelation.
double autocorrelation(std::span<const double> x, std::size_t lag);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against the uniform(0,1) law,
/// asymptotic p-value from the Kolmogorov distribution.
KsResult ks_test_uniform(std::span<const double> u);

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse standard-normal CDF; rational approximation refined by one
/// Halley step, accurate to ~1e-15.
double normal_quantile(double p);

}  // namespace voltide::stats
