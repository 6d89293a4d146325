#include "voltide/cgc.hpp"

#include <algorithm>
#include <cmath>

#include "voltide/csv.hpp"
#include "voltide/errors.hpp"
#include "voltide/parallel.hpp"
#include "voltide/rng.hpp"
#include "voltide/stats.hpp"

namespace voltide::cgc {

namespace {

constexpr double kDensityFloor = 1e-10;
constexpr double kUnitClamp = 1e-12;

// Row-stochastic Gaussian weight matrix over the conditioning variable with
// self-exclusion; rows are softmax-shifted for underflow safety.
std::vector<double> weight_matrix(std::span<const double> cond, double h) {
    const std::size_t n = cond.size();
    std::vector<double> w(n * n);
    const double inv2h2 = 1.0 / (2.0 * h * h);
    std::vector<double> expo(n);
    for (std::size_t t = 0; t < n; ++t) {
        double max_e = -1e308;
        for (std::size_t s = 0; s < n; ++s) {
            if (s == t) continue;
            const double d = cond[s] - cond[t];
            expo[s] = -d * d * inv2h2;
            max_e = std::max(max_e, expo[s]);
        }
        double sum = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            if (s == t) {
                w[t * n + s] = 0.0;
                continue;
            }
            const double e = std::exp(expo[s] - max_e);
            w[t * n + s] = e;
            sum += e;
        }
        const double inv = 1.0 / sum;
        for (std::size_t s = 0; s < n; ++s) w[t * n + s] *= inv;
    }
    return w;
}

std::vector<double> phi_matrix(std::span<const double> x, double h) {
    const std::size_t n = x.size();
    std::vector<double> phi(n * n);
    const double inv_h = 1.0 / h;
    for (std::size_t i = 0; i < n; ++i) {
        phi[i * n + i] = 0.5;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = stats::normal_cdf((x[i] - x[j]) * inv_h);
            phi[i * n + j] = p;
            phi[j * n + i] = 1.0 - p;
        }
    }
    return phi;
}

std::vector<double> apply_weights(const std::vector<double>& w, const std::vector<double>& phi,
                                  std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double* wr = w.data() + t * n;
        const double* pr = phi.data() + t * n;
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += wr[k] * pr[k];
        u[t] = std::clamp(s, kUnitClamp, 1.0 - kUnitClamp);
    }
    return u;
}

double mean_log_density(const BernsteinCopulaDensity& dens, std::span<const double> u,
                        std::span<const double> v) {
    double s = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
        s += std::log(std::max(dens(u[t], v[t]), kDensityFloor));
    }
    return s / static_cast<double>(u.size());
}

// Shared state of one test: fixed target-side PIT, fixed weights, and the
// kernel CDF matrix of the causer values for cheap bootstrap re-evaluation.
struct Workspace {
    std::size_t n = 0;
    int degree = 0;
    std::vector<double> u;        // target conditional PIT
    std::vector<double> v_vals;   // lagged causer values
    std::vector<double> weights;  // n x n
    std::vector<double> phi_v;    // n x n
};

Workspace prepare(std::span<const double> target, std::span<const double> causer,
                  const CgcConfig& cfg) {
    if (target.size() != causer.size()) throw NumericError("cgc: series lengths differ");
    const auto lag = static_cast<std::size_t>(cfg.horizon_lag);
    if (cfg.horizon_lag < 1) throw NumericError("cgc: horizon lag must be >= 1");
    if (target.size() < 100 + lag) throw NumericError("cgc: series too short for lag");

    const std::size_t n = target.size() - lag;
    Workspace ws;
    ws.n = n;
    std::vector<double> y(n), x(n);
    ws.v_vals.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        y[t] = target[t + lag];
        x[t] = target[t];
        ws.v_vals[t] = causer[t];
    }

    const double hx = silverman_bandwidth(x);
    const double hy = silverman_bandwidth(y);
    const double hv = silverman_bandwidth(ws.v_vals);
    if (!(hx > 0.0)) throw NumericError("cgc: constant conditioning variable");
    if (!(hy > 0.0) || !(hv > 0.0)) throw NumericError("cgc: constant series");

    ws.weights = weight_matrix(x, hx);
    ws.u = apply_weights(ws.weights, phi_matrix(y, hy), n);
    ws.phi_v = phi_matrix(ws.v_vals, hv);
    ws.degree = cfg.bernstein_degree > 0 ? cfg.bernstein_degree : bernstein_degree_for(n);
    if (ws.degree < 2) throw NumericError("cgc: bernstein degree must be >= 2");
    return ws;
}

std::vector<double> observed_v(const Workspace& ws) {
    return apply_weights(ws.weights, ws.phi_v, ws.n);
}

std::vector<double> resampled_v(const Workspace& ws, const std::vector<std::size_t>& idx) {
    const std::size_t n = ws.n;
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double* wr = ws.weights.data() + t * n;
        const double* pr = ws.phi_v.data() + idx[t] * n;
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += wr[k] * pr[idx[k]];
        v[t] = std::clamp(s, kUnitClamp, 1.0 - kUnitClamp);
    }
    return v;
}

}  // namespace

double silverman_bandwidth(std::span<const double> x) {
    if (x.size() < 2) throw NumericError("bandwidth needs at least 2 points");
    const double sd = stats::stddev(x);
    const double spread = std::min(sd, stats::iqr(x) / 1.34);
    const double base = spread > 0.0 ? spread : sd;
    return 0.9 * base * std::pow(static_cast<double>(x.size()), -0.2);
}

std::vector<double> conditional_cdf_kde(std::span<const double> y, std::span<const double> cond,
                                        double bandwidth_y, double bandwidth_cond) {
    if (y.size() != cond.size()) throw NumericError("conditional_cdf_kde: length mismatch");
    if (y.size() < 2) throw NumericError("conditional_cdf_kde: need at least 2 points");
    const double hy = bandwidth_y > 0.0 ? bandwidth_y : silverman_bandwidth(y);
    const double hx = bandwidth_cond > 0.0 ? bandwidth_cond : silverman_bandwidth(cond);
    if (!(hy > 0.0)) throw NumericError("conditional_cdf_kde: zero bandwidth for y");
    if (!(hx > 0.0)) throw NumericError("conditional_cdf_kde: constant conditioning variable");
    const auto w = weight_matrix(cond, hx);
    return apply_weights(w, phi_matrix(y, hy), y.size());
}

int bernstein_degree_for(std::size_t n) {
    const int d = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n))));
    return std::clamp(d, 8, 20);
}

BernsteinCopulaDensity::BernsteinCopulaDensity(std::span<const double> u,
                                               std::span<const double> v, int degree)
    : degree_(degree) {
    if (u.empty() || u.size() != v.size()) {
        throw NumericError("bernstein copula: empty or mismatched sample");
    }
    if (degree < 2) throw NumericError("bernstein copula: degree must be >= 2");
    const auto m = static_cast<std::size_t>(degree);
    theta_.assign(m * m, 0.0);
    const double inc = 1.0 / static_cast<double>(u.size());
    for (std::size_t t = 0; t < u.size(); ++t) {
        if (!(u[t] > 0.0 && u[t] < 1.0 && v[t] > 0.0 && v[t] < 1.0)) {
            throw NumericError("bernstein copula: sample outside (0,1)");
        }
        const auto j = std::min(static_cast<std::size_t>(u[t] * degree), m - 1);
        const auto k = std::min(static_cast<std::size_t>(v[t] * degree), m - 1);
        theta_[j * m + k] += inc;
    }
    log_binom_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        log_binom_[j] = std::lgamma(static_cast<double>(m)) -
                        std::lgamma(static_cast<double>(j + 1)) -
                        std::lgamma(static_cast<double>(m - j));
    }
}

double BernsteinCopulaDensity::operator()(double a, double b) const {
    const auto m = static_cast<std::size_t>(degree_);
    // Binomial basis by forward recurrence; endpoints handled exactly.
    const auto basis = [&](double x, std::vector<double>& out) {
        out.assign(m, 0.0);
        if (x <= 0.0) {
            out[0] = 1.0;
            return;
        }
        if (x >= 1.0) {
            out[m - 1] = 1.0;
            return;
        }
        const double ratio = x / (1.0 - x);
        double val = std::pow(1.0 - x, static_cast<double>(m - 1));
        if (val > 0.0) {
            for (std::size_t j = 0; j < m; ++j) {
                out[j] = val;
                val *= ratio * static_cast<double>(m - 1 - j) / static_cast<double>(j + 1);
            }
        } else {
            // Deep tail: evaluate in logs.
            const double lx = std::log(x);
            const double l1x = std::log1p(-x);
            for (std::size_t j = 0; j < m; ++j) {
                out[j] = std::exp(log_binom_[j] + static_cast<double>(j) * lx +
                                  static_cast<double>(m - 1 - j) * l1x);
            }
        }
    };
    thread_local std::vector<double> ba, bb;
    basis(a, ba);
    basis(b, bb);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (ba[j] == 0.0) continue;
        const double* row = theta_.data() + j * m;
        double inner = 0.0;
        for (std::size_t k = 0; k < m; ++k) inner += row[k] * bb[k];
        s += ba[j] * inner;
    }
    return s * static_cast<double>(m) * static_cast<double>(m);
}

double cgc_statistic(std::span<const double> target, std::span<const double> causer,
                     const CgcConfig& cfg) {
    const Workspace ws = prepare(target, causer, cfg);
    const auto v = observed_v(ws);
    const BernsteinCopulaDensity dens(ws.u, v, ws.degree);
    return mean_log_density(dens, ws.u, v);
}

std::vector<std::size_t> stationary_bootstrap_indices(std::size_t n, double expected_block_len,
                                                      std::uint64_t seed) {
    if (n == 0) throw NumericError("bootstrap over empty series");
    if (!(expected_block_len >= 1.0)) throw NumericError("expected block length must be >= 1");
    rng::Rng gen(seed);
    const double p_new = 1.0 / expected_block_len;
    std::vector<std::size_t> idx(n);
    std::size_t pos = static_cast<std::size_t>(gen.uniform_int(n));
    idx[0] = pos;
    for (std::size_t t = 1; t < n; ++t) {
        if (gen.uniform() < p_new) {
            pos = static_cast<std::size_t>(gen.uniform_int(n));
        } else {
            pos = (pos + 1) % n;
        }
        idx[t] = pos;
    }
    return idx;
}

std::string CgcResult::p_value_string() const {
    if (below_resolution) {
        return "<" + csv::format_double(1.0 / static_cast<double>(bootstrap_stats.size()));
    }
    return csv::format_double(p_value);
}

CgcResult bootstrap_cgc(std::span<const double> target, std::span<const double> causer,
                        const CgcConfig& cfg, const std::string& causer_name,
                        const std::string& target_name) {
    if (cfg.n_bootstrap < 100) throw NumericError("cgc: n_bootstrap must be >= 100");
    const Workspace ws = prepare(target, causer, cfg);

    CgcResult res;
    res.causer = causer_name;
    res.target = target_name;
    res.horizon_lag = cfg.horizon_lag;
    {
        const auto v = observed_v(ws);
        const BernsteinCopulaDensity dens(ws.u, v, ws.degree);
        res.statistic = mean_log_density(dens, ws.u, v);
    }

    res.bootstrap_stats.assign(static_cast<std::size_t>(cfg.n_bootstrap), 0.0);
    par::parallel_for(res.bootstrap_stats.size(), [&](std::size_t r) {
        const auto idx = stationary_bootstrap_indices(
            ws.n, cfg.expected_block_len, rng::derive_seed(cfg.seed, "cgc:bootstrap", r));
        const auto v = resampled_v(ws, idx);
        const BernsteinCopulaDensity dens(ws.u, v, ws.degree);
        res.bootstrap_stats[r] = mean_log_density(dens, ws.u, v);
    });

    const auto count = static_cast<double>(
        std::count_if(res.bootstrap_stats.begin(), res.bootstrap_stats.end(),
                      [&](double s) { return s >= res.statistic; }));
    const auto b = static_cast<double>(cfg.n_bootstrap);
    res.below_resolution = count == 0.0;
    res.p_value = std::max(count, 1.0) / b;
    res.significant = res.statistic > stats::quantile(res.bootstrap_stats, cfg.percentile);
    return res;
}

}  // namespace voltide::cgc
