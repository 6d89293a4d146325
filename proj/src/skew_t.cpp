#include "voltide/skew_t.hpp"

#include <cmath>
#include <numbers>

#include "voltide/errors.hpp"
#include "voltide/quadrature.hpp"
#include "voltide/student_t.hpp"

namespace voltide::dist {

namespace {

// Density of the raw (non-standardized) skewed law:
//   g(z) = 2/(xi + 1/xi) * [ f(z/xi) for z >= 0, f(xi*z) for z < 0 ]
// with f the Student-t density. Mean and variance follow from the
// one-sided absolute moments of f.
double raw_log_pdf(double z, double nu, double xi) {
    const double lc = std::log(2.0) - std::log(xi + 1.0 / xi);
    const double arg = z >= 0.0 ? z / xi : z * xi;
    return lc + student_t_log_pdf(arg, nu);
}

double raw_cdf(double z, double nu, double xi) {
    const double xi2 = xi * xi;
    if (z < 0.0) {
        return 2.0 * student_t_cdf(z * xi, nu) / (xi2 + 1.0);
    }
    return (1.0 - xi2 + 2.0 * xi2 * student_t_cdf(z / xi, nu)) / (xi2 + 1.0);
}

double raw_quantile(double u, double nu, double xi) {
    const double xi2 = xi * xi;
    const double split = 1.0 / (xi2 + 1.0);
    if (u < split) {
        return student_t_quantile(0.5 * u * (xi2 + 1.0), nu) / xi;
    }
    return xi * student_t_quantile((u * (xi2 + 1.0) - 1.0 + xi2) / (2.0 * xi2), nu);
}

}  // namespace

SkewTParams make_skew_t(double nu, double xi) {
    if (!(nu > 2.0)) throw NumericError("skew-t requires nu > 2");
    if (!(xi > 0.0)) throw NumericError("skew-t requires xi > 0");
    const double m1 = student_t_mean_abs(nu);
    const double m2 = nu / (nu - 2.0);
    const double mean = m1 * (xi - 1.0 / xi);
    const double second = m2 * (xi * xi + 1.0 / (xi * xi) - 1.0);
    const double var = second - mean * mean;
    if (!(var > 0.0)) throw NumericError("skew-t standardization failed: non-positive variance");
    return {nu, xi, mean, std::sqrt(var)};
}

double skewt_pdf(double x, const SkewTParams& p) { return std::exp(skewt_log_pdf(x, p)); }

double skewt_log_pdf(double x, const SkewTParams& p) {
    return std::log(p.sigma_dist) + raw_log_pdf(p.mu_dist + p.sigma_dist * x, p.nu, p.xi);
}

double skewt_cdf(double x, const SkewTParams& p) {
    return raw_cdf(p.mu_dist + p.sigma_dist * x, p.nu, p.xi);
}

double skewt_quantile(double u, const SkewTParams& p) {
    if (!(u > 0.0 && u < 1.0)) throw NumericError("skewt_quantile needs u in (0,1)");
    return (raw_quantile(u, p.nu, p.xi) - p.mu_dist) / p.sigma_dist;
}

double skewt_mean_abs(const SkewTParams& p) {
    // E|Z| = 2 E[(Z - mean)^+] / sigma for the raw law; integrate the upper
    // branch on a tangent-compressed axis so heavy tails are captured.
    const double halfpi = 0.5 * std::numbers::pi;
    const auto integrand = [&](double theta) {
        if (theta >= halfpi - 1e-12) return 0.0;
        const double t = std::tan(theta);
        const double sec2 = 1.0 + t * t;
        return t * std::exp(raw_log_pdf(p.mu_dist + t, p.nu, p.xi)) * sec2;
    };
    const double upper = quad::adaptive_simpson(integrand, 0.0, halfpi - 1e-9, 1e-11);
    return 2.0 * upper / p.sigma_dist;
}

}  // namespace voltide::dist
