#include "voltide/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "voltide/errors.hpp"

namespace voltide::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw NumericError("mean of empty sequence");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw NumericError("variance needs at least 2 observations");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

double population_variance(std::span<const double> x) {
    if (x.empty()) throw NumericError("variance of empty sequence");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

double population_stddev(std::span<const double> x) {
    return std::sqrt(population_variance(x));
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw NumericError("quantile of empty sequence");
    if (p < 0.0 || p > 1.0) throw NumericError("quantile probability outside [0,1]");
    if (sorted.size() == 1) return sorted[0];
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(h);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

double quantile(std::span<const double> x, double p) {
    std::vector<double> copy(x.begin(), x.end());
    std::sort(copy.begin(), copy.end());
    return quantile_sorted(copy, p);
}

double iqr(std::span<const double> x) {
    std::vector<double> copy(x.begin(), x.end());
    std::sort(copy.begin(), copy.end());
    return quantile_sorted(copy, 0.75) - quantile_sorted(copy, 0.25);
}

double autocorrelation(std::span<const double> x, std::size_t lag) {
    if (x.size() <= lag + 1) throw NumericError("series too short for requested lag");
    const double m = mean(x);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - m) * (x[t] - m);
        if (t >= lag) num += (x[t] - m) * (x[t - lag] - m);
    }
    if (den == 0.0) throw NumericError("autocorrelation of constant series");
    return num / den;
}

KsResult ks_test_uniform(std::span<const double> u) {
    if (u.empty()) throw NumericError("KS test on empty sample");
    std::vector<double> s(u.begin(), u.end());
    std::sort(s.begin(), s.end());
    const auto n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - s[i];
        const double lo = s[i] - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    // Asymptotic Kolmogorov tail with the small-sample adjustment of
    // Stephens (1970): lambda = D * (sqrt(n) + 0.12 + 0.11/sqrt(n)).
    const double sq = std::sqrt(n);
    const double lambda = d * (sq + 0.12 + 0.11 / sq);
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                            std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return {d, std::clamp(p, 0.0, 1.0)};
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw NumericError("normal quantile needs p in (0,1)");
    // Acklam's rational approximation.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement against the exact CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace voltide::stats
