#pragma once

namespace voltide::dist {

/// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

double student_t_pdf(double x, double nu);
double student_t_log_pdf(double x, double nu);
double student_t_cdf(double x, double nu);

/// Inverse CDF; Newton iteration from a normal start with bisection fallback.
double student_t_quantile(double p, double nu);

/// E|X| for X ~ Student-t(nu), nu > 1 (closed form).
double student_t_mean_abs(double nu);

}  // namespace voltide::dist
