#include "voltide/egarch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "voltide/errors.hpp"
#include "voltide/nelder_mead.hpp"
#include "voltide/rng.hpp"
#include "voltide/stats.hpp"
#include "voltide/student_t.hpp"

namespace voltide::garch {

namespace {

constexpr double kLnSig2Cap = 690.0;  // keeps exp() finite; binds only on absurd parameters

// Skew-t log-density with the normalization constant hoisted out of the
// observation loop.
struct FastSkewT {
    double xi;
    double m;
    double s;
    double log_const;
    double neg_half_nup1;
    double inv_nu;

    explicit FastSkewT(const dist::SkewTParams& p)
        : xi(p.xi),
          m(p.mu_dist),
          s(p.sigma_dist),
          log_const(std::log(p.sigma_dist) + std::log(2.0) - std::log(p.xi + 1.0 / p.xi) +
                    std::lgamma(0.5 * (p.nu + 1.0)) - std::lgamma(0.5 * p.nu) -
                    0.5 * std::log(p.nu * std::numbers::pi)),
          neg_half_nup1(-0.5 * (p.nu + 1.0)),
          inv_nu(1.0 / p.nu) {}

    [[nodiscard]] double log_pdf(double z) const {
        const double y = m + s * z;
        const double a = y >= 0.0 ? y / xi : y * xi;
        return log_const + neg_half_nup1 * std::log1p(a * a * inv_nu);
    }
};

struct FilterOutcome {
    FilterState state;
    double log_likelihood = 0.0;
};

FilterOutcome run_filter(const EgarchParams& p, std::span<const double> x, bool keep_paths) {
    if (x.size() < 2) throw NumericError("egarch filter needs at least 2 observations");
    const double sd0 = stats::stddev(x);
    if (!(sd0 > 0.0)) throw NumericError("egarch filter: degenerate (constant) input");

    const FastSkewT fast(p.dist);
    FilterOutcome out;
    if (keep_paths) {
        out.state.residuals.reserve(x.size() - 1);
        out.state.cond_vols.reserve(x.size() - 1);
    }

    double ln_sig2 = 2.0 * std::log(sd0);
    double z_prev = 0.0;
    double sigma = sd0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        ln_sig2 = p.omega + p.beta * ln_sig2 + p.gamma * z_prev +
                  p.alpha * (std::abs(z_prev) - p.e_abs_z);
        ln_sig2 = std::clamp(ln_sig2, -kLnSig2Cap, kLnSig2Cap);
        sigma = std::exp(0.5 * ln_sig2);
        const double z = (x[t] - p.mu - p.phi * x[t - 1]) / sigma;
        out.log_likelihood += fast.log_pdf(z) - 0.5 * ln_sig2;
        if (keep_paths) {
            out.state.residuals.push_back(z);
            out.state.cond_vols.push_back(sigma);
        }
        z_prev = z;
    }
    out.state.sigma = sigma;
    out.state.last_value = x.back();
    return out;
}

// Optimization happens on an unconstrained scale; tanh/logistic maps enforce
// the documented parameter bounds.
constexpr double kPhiBound = 0.999;
constexpr double kNuLo = 2.05;
constexpr double kNuHi = 200.0;
constexpr double kXiLo = 0.2;
constexpr double kXiHi = 5.0;

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

EgarchParams params_from_u(const std::vector<double>& u) {
    EgarchParams p;
    p.mu = u[0];
    p.phi = kPhiBound * std::tanh(u[1]);
    p.omega = u[2];
    p.alpha = u[3];
    p.beta = kPhiBound * std::tanh(u[4]);
    p.gamma = u[5];
    const double nu = kNuLo + (kNuHi - kNuLo) * sigmoid(u[6]);
    const double xi = kXiLo + (kXiHi - kXiLo) * sigmoid(u[7]);
    p.dist = dist::make_skew_t(nu, xi);
    p.e_abs_z = dist::skewt_mean_abs(p.dist);
    return p;
}

std::vector<double> u_from_params(const EgarchParams& p) {
    const auto clamp01 = [](double v) { return std::clamp(v, 1e-9, 1.0 - 1e-9); };
    std::vector<double> u(8);
    u[0] = p.mu;
    u[1] = std::atanh(std::clamp(p.phi / kPhiBound, -1.0 + 1e-9, 1.0 - 1e-9));
    u[2] = p.omega;
    u[3] = p.alpha;
    u[4] = std::atanh(std::clamp(p.beta / kPhiBound, -1.0 + 1e-9, 1.0 - 1e-9));
    u[5] = p.gamma;
    u[6] = logit(clamp01((p.dist.nu - kNuLo) / (kNuHi - kNuLo)));
    u[7] = logit(clamp01((p.dist.xi - kXiLo) / (kXiHi - kXiLo)));
    return u;
}

}  // namespace

FilterState filter(const EgarchParams& params, std::span<const double> values) {
    return run_filter(params, values, true).state;
}

void extend_filter(const EgarchParams& params, FilterState& state,
                   std::span<const double> new_values) {
    if (state.residuals.empty()) throw NumericError("extend_filter: empty state");
    double ln_sig2 = 2.0 * std::log(state.sigma);
    double z_prev = state.residuals.back();
    double prev_value = state.last_value;
    for (const double x : new_values) {
        ln_sig2 = params.omega + params.beta * ln_sig2 + params.gamma * z_prev +
                  params.alpha * (std::abs(z_prev) - params.e_abs_z);
        ln_sig2 = std::clamp(ln_sig2, -kLnSig2Cap, kLnSig2Cap);
        const double sigma = std::exp(0.5 * ln_sig2);
        const double z = (x - params.mu - params.phi * prev_value) / sigma;
        state.residuals.push_back(z);
        state.cond_vols.push_back(sigma);
        state.sigma = sigma;
        prev_value = x;
        z_prev = z;
    }
    state.last_value = prev_value;
}

double log_likelihood(const EgarchParams& params, std::span<const double> values) {
    return run_filter(params, values, false).log_likelihood;
}

EgarchModel fit_egarch(std::span<const double> values, std::uint64_t seed,
                       const std::optional<EgarchParams>& warm_start) {
    if (values.size() < 250) {
        throw NumericError("fit_egarch: need at least 250 observations");
    }
    const double sd0 = stats::stddev(values);
    if (!(sd0 > 0.0)) throw NumericError("fit_egarch: degenerate (constant) input");

    const auto objective = [&](const std::vector<double>& u) {
        const EgarchParams p = params_from_u(u);
        const double ll = run_filter(p, values, false).log_likelihood;
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
    };

    // Moment-based start: AR(1) coefficient from the lag-1 autocorrelation,
    // unconditional variance feeding omega through the log-variance mean.
    EgarchParams start;
    start.phi = std::clamp(stats::autocorrelation(values, 1), -0.9, 0.9);
    start.mu = stats::mean(values) * (1.0 - start.phi);
    start.beta = 0.9;
    const double resid_var = stats::variance(values) * (1.0 - start.phi * start.phi);
    start.omega = (1.0 - start.beta) * std::log(std::max(resid_var, 1e-300));
    start.alpha = 0.1;
    start.gamma = -0.05;
    start.dist = dist::make_skew_t(8.0, 1.0);
    const std::vector<double> u0 = u_from_params(start);

    std::vector<std::vector<double>> starts;
    if (warm_start.has_value()) {
        starts.push_back(u_from_params(*warm_start));
        starts.push_back(u0);
    } else {
        starts.push_back(u0);
        for (int j = 0; j < 4; ++j) {
            rng::Rng jitter(rng::derive_seed(seed, "egarch:jitter", static_cast<std::uint64_t>(j)));
            auto u = u0;
            u[0] += jitter.uniform(-0.4, 0.4) * sd0;
            for (std::size_t i = 1; i < u.size(); ++i) u[i] += jitter.uniform(-0.4, 0.4);
            starts.push_back(std::move(u));
        }
    }

    opt::NelderMeadOptions opts;
    opts.f_tolerance = 1e-6;
    opts.max_iterations = 6000;
    opts.initial_step = {0.1 * sd0, 0.2, 0.3, 0.1, 0.2, 0.1, 0.5, 0.5};

    opt::NelderMeadResult best;
    best.f = std::numeric_limits<double>::max();
    bool any_converged = false;
    for (const auto& s : starts) {
        auto res = opt::nelder_mead(objective, s, opts);
        // Simplex search can stall on flat ridges before reaching the f
        // tolerance; restarting from the incumbent with a shrunken simplex
        // collapses the remaining spread cheaply.
        for (int restart = 0; restart < 2 && !res.converged; ++restart) {
            auto local = opts;
            local.initial_step.clear();
            const double scale = restart == 0 ? 0.1 : 0.01;
            for (const double step : opts.initial_step) {
                local.initial_step.push_back(step * scale);
            }
            const auto again = opt::nelder_mead(objective, res.x, local);
            if (again.f <= res.f) res = again;
            res.converged = again.converged;
        }
        any_converged = any_converged || res.converged;
        if (res.f < best.f) best = res;
    }
    if (!any_converged) {
        throw NumericError("fit_egarch: no start converged; best log-likelihood " +
                           std::to_string(-best.f));
    }

    EgarchModel model;
    model.params = params_from_u(best.x);
    auto outcome = run_filter(model.params, values, true);
    model.state = std::move(outcome.state);
    model.log_likelihood = outcome.log_likelihood;
    model.converged = true;
    return model;
}

OneStepForecast forecast_one_step(const EgarchParams& params, const FilterState& state) {
    if (state.residuals.empty() || !(state.sigma > 0.0)) {
        throw NumericError("forecast_one_step: state has no filtered history");
    }
    const double z = state.residuals.back();
    double ln_sig2 = params.omega + params.beta * 2.0 * std::log(state.sigma) +
                     params.gamma * z + params.alpha * (std::abs(z) - params.e_abs_z);
    ln_sig2 = std::clamp(ln_sig2, -kLnSig2Cap, kLnSig2Cap);
    return {params.mu + params.phi * state.last_value, std::exp(0.5 * ln_sig2)};
}

double pit(double z, const dist::SkewTParams& d) { return dist::skewt_cdf(z, d); }

double inverse_pit(double u, const dist::SkewTParams& d) {
    if (!(u > 0.0 && u < 1.0)) throw NumericError("inverse_pit: u must lie strictly in (0,1)");
    return dist::skewt_quantile(u, d);
}

std::vector<double> simulate(const EgarchParams& params, std::size_t n, std::uint64_t seed,
                             std::size_t burn_in) {
    EgarchParams p = params;
    if (p.e_abs_z == 0.0) p.e_abs_z = dist::skewt_mean_abs(p.dist);
    rng::Rng gen(seed);
    std::vector<double> out;
    out.reserve(n);
    double ln_sig2 = p.omega / (1.0 - p.beta);
    double r_prev = p.mu / (1.0 - p.phi);
    double z_prev = 0.0;
    for (std::size_t t = 0; t < n + burn_in; ++t) {
        ln_sig2 = p.omega + p.beta * ln_sig2 + p.gamma * z_prev +
                  p.alpha * (std::abs(z_prev) - p.e_abs_z);
        ln_sig2 = std::clamp(ln_sig2, -kLnSig2Cap, kLnSig2Cap);
        const double sigma = std::exp(0.5 * ln_sig2);
        const double z = dist::skewt_quantile(gen.uniform(), p.dist);
        const double r = p.mu + p.phi * r_prev + sigma * z;
        if (t >= burn_in) out.push_back(r);
        r_prev = r;
        z_prev = z;
    }
    return out;
}

}  // namespace voltide::garch
