#include "voltide/student_t.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "voltide/errors.hpp"
#include "voltide/stats.hpp"

namespace voltide::dist {

namespace {

// Continued fraction for the incomplete beta (modified Lentz algorithm).
double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_log_pdf(double x, double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(nu * std::numbers::pi) -
           0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double student_t_pdf(double x, double nu) { return std::exp(student_t_log_pdf(x, nu)); }

double student_t_cdf(double x, double nu) {
    if (x == 0.0) return 0.5;
    const double ib = incomplete_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    return x < 0.0 ? 0.5 * ib : 1.0 - 0.5 * ib;
}

double student_t_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0)) throw NumericError("student_t_quantile needs p in (0,1)");
    if (p == 0.5) return 0.0;

    double x = stats::normal_quantile(p);
    // Expanding bracket around the normal start.
    double lo = x - 1.0;
    double hi = x + 1.0;
    while (student_t_cdf(lo, nu) > p) lo = 2.0 * lo - x - 1.0;
    while (student_t_cdf(hi, nu) < p) hi = 2.0 * hi - x + 1.0;

    x = std::clamp(x, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double err = student_t_cdf(x, nu) - p;
        if (err > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double dens = student_t_pdf(x, nu);
        double next = dens > 0.0 ? x - err / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-14 * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

double student_t_mean_abs(double nu) {
    if (nu <= 1.0) throw NumericError("E|X| of Student-t requires nu > 1");
    return 2.0 * std::sqrt(nu) *
           std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
           (std::sqrt(std::numbers::pi) * (nu - 1.0));
}

}  // namespace voltide::dist
