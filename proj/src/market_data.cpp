#include "voltide/market_data.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "voltide/csv.hpp"
#include "voltide/errors.hpp"
#include "voltide/stats.hpp"

namespace voltide::data {

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::delta_log_volume: return "delta_log_volume";
        case Metric::delta_sigma_up: return "delta_sigma_up";
        case Metric::delta_sigma_down: return "delta_sigma_down";
    }
    return "unknown";
}

void validate_bar(const Bar& bar, const std::string& context) {
    if (!(bar.open > 0.0) || !(bar.high > 0.0) || !(bar.low > 0.0) || !(bar.close > 0.0)) {
        throw DataError(context + ": non-positive price");
    }
    if (bar.low > std::min(bar.open, bar.close)) {
        throw DataError(context + ": low above open/close");
    }
    if (bar.high < std::max(bar.open, bar.close)) {
        throw DataError(context + ": high below open/close");
    }
    if (bar.volume < 0.0) {
        throw DataError(context + ": negative volume");
    }
}

void validate_series(const OhlcvSeries& series) {
    for (std::size_t i = 1; i < series.bars.size(); ++i) {
        const auto gap = series.bars[i].date - series.bars[i - 1].date;
        if (gap == 0) {
            throw DataError(series.asset_id + ": duplicate date " +
                            series.bars[i].date.to_string());
        }
        if (gap != 1) {
            throw DataError(series.asset_id + ": calendar gap after " +
                            series.bars[i - 1].date.to_string() + " (next row is " +
                            series.bars[i].date.to_string() + ")");
        }
    }
}

OhlcvSeries load_ohlcv_csv(const std::filesystem::path& path, const CsvSchema& schema,
                           const std::string& asset_id) {
    const csv::Table t = csv::read_table(path);
    const std::size_t c_date = t.column(schema.date);
    const std::size_t c_open = t.column(schema.open);
    const std::size_t c_high = t.column(schema.high);
    const std::size_t c_low = t.column(schema.low);
    const std::size_t c_close = t.column(schema.close);
    const std::size_t c_volume = t.column(schema.volume);

    OhlcvSeries series;
    series.asset_id = asset_id.empty() ? path.stem().string() : asset_id;
    series.bars.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        const std::string context = series.asset_id + " row " + std::to_string(i + 1);
        Bar bar;
        bar.date = Date::parse(row[c_date]);
        bar.open = csv::parse_double(row[c_open], context);
        bar.high = csv::parse_double(row[c_high], context);
        bar.low = csv::parse_double(row[c_low], context);
        bar.close = csv::parse_double(row[c_close], context);
        bar.volume = csv::parse_double(row[c_volume], context);
        validate_bar(bar, context);
        if (!(bar.volume > 0.0)) {
            throw DataError(context + " (" + bar.date.to_string() + "): zero volume");
        }
        series.bars.push_back(bar);
    }
    std::sort(series.bars.begin(), series.bars.end(),
              [](const Bar& a, const Bar& b) { return a.date < b.date; });
    validate_series(series);
    return series;
}

VolComponents rogers_satchell(const Bar& bar) {
    const double up = std::log(bar.high / bar.close) * std::log(bar.high / bar.open);
    const double down = std::log(bar.low / bar.close) * std::log(bar.low / bar.open);
    // Radicands are non-negative for any valid bar; clamp away -0 noise.
    return {std::sqrt(std::max(up, 0.0)), std::sqrt(std::max(down, 0.0))};
}

std::vector<TransformedSeries> transform(const OhlcvSeries& series) {
    if (series.bars.size() < 2) {
        throw DataError(series.asset_id + ": need at least 2 bars to difference");
    }
    const std::size_t n = series.bars.size();
    std::vector<VolComponents> vol(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(series.bars[i].volume > 0.0)) {
            throw DataError(series.asset_id + ": zero volume on " +
                            series.bars[i].date.to_string());
        }
        vol[i] = rogers_satchell(series.bars[i]);
    }

    TransformedSeries dv{series.asset_id, Metric::delta_log_volume, {}, {}};
    TransformedSeries dup{series.asset_id, Metric::delta_sigma_up, {}, {}};
    TransformedSeries ddown{series.asset_id, Metric::delta_sigma_down, {}, {}};
    for (auto* ts : {&dv, &dup, &ddown}) {
        ts->dates.reserve(n - 1);
        ts->values.reserve(n - 1);
    }
    for (std::size_t i = 1; i < n; ++i) {
        const Date d = series.bars[i].date;
        dv.dates.push_back(d);
        dup.dates.push_back(d);
        ddown.dates.push_back(d);
        dv.values.push_back(std::log(series.bars[i].volume / series.bars[i - 1].volume));
        dup.values.push_back(vol[i].sigma_up - vol[i - 1].sigma_up);
        ddown.values.push_back(vol[i].sigma_down - vol[i - 1].sigma_down);
    }
    return {std::move(dv), std::move(dup), std::move(ddown)};
}

std::vector<double> winsorize(std::span<const double> values, double lower_q, double upper_q) {
    if (values.empty()) throw DataError("winsorize: empty input");
    if (!(lower_q >= 0.0 && lower_q < upper_q && upper_q <= 1.0)) {
        throw DataError("winsorize: quantiles must satisfy 0 <= lower < upper <= 1");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = stats::quantile_sorted(sorted, lower_q);
    const double hi = stats::quantile_sorted(sorted, upper_q);
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v = std::clamp(v, lo, hi);
    return out;
}

namespace {

struct OlsFit {
    Eigen::VectorXd beta;
    double ssr = 0.0;
    Eigen::MatrixXd xtx_inv;
    Eigen::Index nobs = 0;
};

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    OlsFit fit;
    fit.nobs = x.rows();
    fit.beta = x.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd resid = y - x * fit.beta;
    fit.ssr = resid.squaredNorm();
    fit.xtx_inv = (x.transpose() * x).ldlt().solve(
        Eigen::MatrixXd::Identity(x.cols(), x.cols()));
    return fit;
}

// MacKinnon (1994, 2010) response-surface coefficients for the
// constant-only regression.
double mackinnon_p_const(double stat) {
    constexpr double tau_max = 2.74;
    constexpr double tau_min = -18.83;
    constexpr double tau_star = -1.61;
    constexpr double small_p[] = {2.1659, 1.4412, 3.8296e-2};
    constexpr double large_p[] = {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2};
    if (stat > tau_max) return 1.0;
    if (stat < tau_min) return 0.0;
    double z = 0.0;
    if (stat <= tau_star) {
        for (int i = 2; i >= 0; --i) z = z * stat + small_p[i];
    } else {
        for (int i = 3; i >= 0; --i) z = z * stat + large_p[i];
    }
    return stats::normal_cdf(z);
}

Eigen::MatrixXd adf_design(std::span<const double> y, std::span<const double> dy, int k,
                           std::size_t start, std::size_t nobs) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(nobs), k + 2);
    for (std::size_t r = 0; r < nobs; ++r) {
        const std::size_t t = start + r;
        x(static_cast<Eigen::Index>(r), 0) = y[t];
        for (int i = 1; i <= k; ++i) {
            x(static_cast<Eigen::Index>(r), i) = dy[t - static_cast<std::size_t>(i)];
        }
        x(static_cast<Eigen::Index>(r), k + 1) = 1.0;
    }
    return x;
}

}  // namespace

AdfResult adf_test(std::span<const double> values, int max_lag) {
    const std::size_t n = values.size();
    if (max_lag < 0) throw NumericError("adf_test: max_lag must be >= 0");
    if (n <= static_cast<std::size_t>(max_lag) + 10) {
        throw NumericError("adf_test: series too short for max_lag");
    }
    const double sd = stats::population_stddev(values);
    if (!(sd > 0.0)) throw NumericError("adf_test: constant input");

    std::vector<double> dy(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t) dy[t] = values[t + 1] - values[t];

    // Lag order by AIC on a common estimation sample so candidate fits are
    // comparable, then a full-sample refit at the chosen order.
    const auto ml = static_cast<std::size_t>(max_lag);
    const std::size_t common_nobs = dy.size() - ml;
    Eigen::VectorXd y_common(static_cast<Eigen::Index>(common_nobs));
    for (std::size_t r = 0; r < common_nobs; ++r) {
        y_common(static_cast<Eigen::Index>(r)) = dy[ml + r];
    }
    int best_k = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= max_lag; ++k) {
        const Eigen::MatrixXd x = adf_design(values, dy, k, ml, common_nobs);
        const OlsFit fit = ols(x, y_common);
        const double aic = static_cast<double>(common_nobs) *
                               std::log(fit.ssr / static_cast<double>(common_nobs)) +
                           2.0 * static_cast<double>(k + 2);
        if (aic < best_aic) {
            best_aic = aic;
            best_k = k;
        }
    }

    const auto bk = static_cast<std::size_t>(best_k);
    const std::size_t nobs = dy.size() - bk;
    Eigen::VectorXd yv(static_cast<Eigen::Index>(nobs));
    for (std::size_t r = 0; r < nobs; ++r) yv(static_cast<Eigen::Index>(r)) = dy[bk + r];
    const Eigen::MatrixXd x = adf_design(values, dy, best_k, bk, nobs);
    const OlsFit fit = ols(x, yv);

    const double dof = static_cast<double>(nobs) - static_cast<double>(best_k + 2);
    if (!(dof > 0.0)) throw NumericError("adf_test: insufficient degrees of freedom");
    const double sigma2 = fit.ssr / dof;
    const double se = std::sqrt(sigma2 * fit.xtx_inv(0, 0));
    if (!(se > 0.0)) throw NumericError("adf_test: degenerate regression");
    const double stat = fit.beta(0) / se;
    return {stat, mackinnon_p_const(stat), best_k};
}

}  // namespace voltide::data
