#include "voltide/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "voltide/errors.hpp"
#include "voltide/stats.hpp"

namespace voltide::strategy {

SignalState net_volatility_signal(double sigma_up_bar, double sigma_down_bar,
                                  double delta_up_hat, double delta_down_hat) {
    SignalState s;
    s.sigma_up_bar = sigma_up_bar;
    s.sigma_down_bar = sigma_down_bar;
    s.delta_up_hat = delta_up_hat;
    s.delta_down_hat = delta_down_hat;
    s.sigma_up_hat = std::max(0.0, sigma_up_bar + delta_up_hat);
    s.sigma_down_hat = std::max(0.0, sigma_down_bar + delta_down_hat);
    s.sigma_daily_hat = s.sigma_up_hat + s.sigma_down_hat;
    if (s.sigma_daily_hat > 0.0) {
        s.signal = (s.sigma_up_hat - s.sigma_down_hat) / s.sigma_daily_hat;
    } else {
        s.signal = 0.0;
        s.degenerate = true;
    }
    return s;
}

std::vector<double> pc_ratio_weights(std::span<const double> loadings_up,
                                     std::span<const double> loadings_down) {
    if (loadings_up.empty() || loadings_up.size() != loadings_down.size()) {
        throw DataError("pc_ratio_weights: loading vectors empty or mismatched");
    }
    std::vector<double> ratios(loadings_up.size());
    double total = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(loadings_up[i] > 0.0) || !(loadings_down[i] > 0.0)) {
            throw DataError("pc_ratio_weights: non-positive loading at asset " +
                            std::to_string(i));
        }
        ratios[i] = loadings_up[i] / loadings_down[i];
        total += ratios[i];
    }
    for (double& r : ratios) r /= total;
    return ratios;
}

double base_exposure(double sigma_daily_hat, double sigma_target, double days_per_year) {
    if (!(sigma_daily_hat > 0.0)) throw NumericError("base_exposure: non-positive forecast");
    return sigma_target / (sigma_daily_hat * std::sqrt(days_per_year));
}

double confidence_multiplier(double z_score) { return 1.0 + std::tanh(z_score); }

PerformanceSummary performance_metrics(std::span<const double> net_returns,
                                       double days_per_year) {
    if (net_returns.size() < 2) throw NumericError("performance_metrics: need >= 2 returns");
    const auto n = static_cast<double>(net_returns.size());

    PerformanceSummary out;
    double equity = 1.0;
    double peak = 1.0;
    double max_dd = 0.0;
    double downside_sq = 0.0;
    bool any_negative = false;
    bool wiped_out = false;
    for (const double r : net_returns) {
        equity *= 1.0 + r;
        if (equity <= 0.0) wiped_out = true;
        peak = std::max(peak, equity);
        max_dd = std::min(max_dd, equity / peak - 1.0);
        if (r < 0.0) {
            any_negative = true;
            downside_sq += r * r;
        }
    }
    out.max_drawdown = std::max(max_dd, -1.0);
    out.ann_vol = stats::stddev(net_returns) * std::sqrt(days_per_year);
    out.ann_return = wiped_out ? -1.0 : std::pow(equity, days_per_year / n) - 1.0;

    const double downside_dev = std::sqrt(downside_sq / n);
    if (!any_negative) {
        out.sortino_infinite = true;
        out.sortino = std::numeric_limits<double>::infinity();
    } else {
        out.sortino = out.ann_return / (downside_dev * std::sqrt(days_per_year));
    }
    return out;
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::benchmark: return "benchmark";
        case Variant::challenger: return "challenger";
        case Variant::naive: return "naive";
        case Variant::buy_and_hold: return "buy_and_hold";
    }
    return "unknown";
}

StrategyLedger run_strategy_ledger(Variant variant, std::span<const StrategyDay> days,
                                   const StrategyConfig& cfg) {
    StrategyLedger ledger;
    ledger.variant = variant;
    ledger.sigma_target = cfg.sigma_target;
    if (days.empty()) return ledger;

    const std::size_t n_assets = days.front().asset_returns.size();
    const std::vector<double> equal_weights(n_assets, 1.0 / static_cast<double>(n_assets));
    std::vector<double> prev_position(n_assets, 0.0);
    std::vector<double> signal_history;
    double prev_exposure = 0.0;
    std::vector<double> prev_weights = equal_weights;
    double equity = 1.0;

    for (const auto& day : days) {
        LedgerRow row;
        row.date = day.date;

        try {
            switch (variant) {
                case Variant::benchmark:
                case Variant::challenger: {
                    const bool ch = variant == Variant::challenger;
                    const auto sig = net_volatility_signal(
                        day.sigma_up_bar, day.sigma_down_bar,
                        ch ? day.delta_up_challenger : day.delta_up_benchmark,
                        ch ? day.delta_down_challenger : day.delta_down_benchmark);
                    row.signal = sig.signal;
                    row.degenerate = sig.degenerate;
                    if (sig.degenerate) {
                        // No usable forecast: hold yesterday's book, flag the day.
                        row.exposure = prev_exposure;
                        row.weights = prev_weights;
                    } else {
                        double z = 0.0;
                        if (signal_history.size() >= static_cast<std::size_t>(cfg.signal_window)) {
                            const std::span<const double> window(
                                signal_history.data() + signal_history.size() -
                                    static_cast<std::size_t>(cfg.signal_window),
                                static_cast<std::size_t>(cfg.signal_window));
                            const double sd = stats::population_stddev(window);
                            if (sd > 0.0) z = (sig.signal - stats::mean(window)) / sd;
                        }
                        row.multiplier = confidence_multiplier(z);
                        row.exposure =
                            base_exposure(sig.sigma_daily_hat, cfg.sigma_target,
                                          cfg.days_per_year) *
                            row.multiplier;
                        row.weights = day.weights;
                    }
                    signal_history.push_back(sig.signal);
                    break;
                }
                case Variant::naive: {
                    row.weights = equal_weights;
                    row.exposure = base_exposure(day.trailing_sigma_daily, cfg.sigma_target,
                                                 cfg.days_per_year);
                    break;
                }
                case Variant::buy_and_hold: {
                    row.weights = equal_weights;
                    row.exposure = 1.0;
                    break;
                }
            }
        } catch (const std::exception& e) {
            ledger.failure = forecast::StageFailure{day.date, "strategy", e.what()};
            break;
        }

        double gross = 0.0;
        double turnover = 0.0;
        for (std::size_t i = 0; i < n_assets; ++i) {
            const double pos = row.exposure * row.weights[i];
            gross += pos * day.asset_returns[i];
            turnover += std::abs(pos - prev_position[i]);
            prev_position[i] = pos;
        }
        row.gross_return = gross;
        row.turnover = turnover;
        row.cost = cfg.cost_bp * 1e-4 * turnover;
        row.net_return = gross - row.cost;
        equity *= 1.0 + row.net_return;
        row.equity = equity;

        prev_exposure = row.exposure;
        prev_weights = row.weights;
        ledger.rows.push_back(std::move(row));
    }

    if (ledger.rows.size() >= 2) {
        std::vector<double> rets;
        rets.reserve(ledger.rows.size());
        for (const auto& r : ledger.rows) rets.push_back(r.net_return);
        ledger.summary = performance_metrics(rets, cfg.days_per_year);
    }
    return ledger;
}

namespace {

// Predicted first-component score mapped back to the cross-asset average of
// the differenced volatility panel: invert the standardization per asset via
// the rank-1 reconstruction, then average.
double shock_in_average_units(const factors::PcaModel& pca, double score_hat) {
    double s = 0.0;
    const std::size_t k = pca.asset_ids.size();
    for (std::size_t i = 0; i < k; ++i) {
        s += pca.means[i] + pca.stds[i] * pca.loadings[0][i] * score_hat;
    }
    return s / static_cast<double>(k);
}

}  // namespace

std::vector<StrategyDay> collect_strategy_days(const forecast::FactorDataset& data,
                                               const MarketDaily& market,
                                               const StrategyTaskSpec& spec,
                                               const forecast::BacktestConfig& cfg,
                                               int naive_trailing_days) {
    if (market.dates != data.dates) {
        throw DataError("collect_strategy_days: market data not aligned with factor dataset");
    }
    const std::size_t n_assets = market.asset_ids.size();
    if (n_assets == 0) throw DataError("collect_strategy_days: no portfolio assets");

    std::vector<forecast::PredictionTask> tasks;
    const auto two_channels = [](std::initializer_list<std::string> ids) {
        forecast::FeatureSpec s;
        for (const auto& id : ids) {
            if (std::find_if(s.sources.begin(), s.sources.end(), [&](const auto& src) {
                    return src.factor_id == id;
                }) != s.sources.end()) {
                continue;
            }
            s.sources.push_back({id, forecast::Channel::uniform_residual});
            s.sources.push_back({id, forecast::Channel::conditional_volatility});
        }
        return s;
    };
    tasks.push_back({"benchmark_up", spec.up_target, two_channels({spec.up_target})});
    tasks.push_back({"benchmark_down", spec.down_target, two_channels({spec.down_target})});
    tasks.push_back(
        {"challenger_up", spec.up_target, two_channels({spec.up_target, spec.up_causer})});
    tasks.push_back({"challenger_down", spec.down_target,
                     two_channels({spec.down_target, spec.down_causer})});

    forecast::ExpandingForecaster engine(data, tasks, cfg);

    std::vector<StrategyDay> out;
    while (!engine.done()) {
        const auto day = engine.step();
        const std::size_t d = day.day_index;
        const std::size_t as_of = d - 1;

        StrategyDay sd;
        sd.date = day.date;
        double up_bar = 0.0;
        double down_bar = 0.0;
        for (std::size_t i = 0; i < n_assets; ++i) {
            up_bar += market.sigma_up[i][as_of];
            down_bar += market.sigma_down[i][as_of];
        }
        sd.sigma_up_bar = up_bar / static_cast<double>(n_assets);
        sd.sigma_down_bar = down_bar / static_cast<double>(n_assets);

        const auto& pca_up = engine.category(spec.up_target).pca;
        const auto& pca_down = engine.category(spec.down_target).pca;
        sd.delta_up_benchmark = shock_in_average_units(pca_up, day.tasks[0].y_hat);
        sd.delta_down_benchmark = shock_in_average_units(pca_down, day.tasks[1].y_hat);
        sd.delta_up_challenger = shock_in_average_units(pca_up, day.tasks[2].y_hat);
        sd.delta_down_challenger = shock_in_average_units(pca_down, day.tasks[3].y_hat);
        sd.weights = pc_ratio_weights(pca_up.pc1(), pca_down.pc1());

        sd.asset_returns.resize(n_assets);
        for (std::size_t i = 0; i < n_assets; ++i) {
            sd.asset_returns[i] = market.returns[i][d];
        }

        const auto window = static_cast<std::size_t>(naive_trailing_days);
        const std::size_t start = as_of + 1 >= window ? as_of + 1 - window : 0;
        double trail = 0.0;
        for (std::size_t t = start; t <= as_of; ++t) {
            double daily = 0.0;
            for (std::size_t i = 0; i < n_assets; ++i) {
                daily += market.sigma_up[i][t] + market.sigma_down[i][t];
            }
            trail += daily / static_cast<double>(n_assets);
        }
        sd.trailing_sigma_daily = trail / static_cast<double>(as_of + 1 - start);

        out.push_back(std::move(sd));
    }
    return out;
}

}  // namespace voltide::strategy
