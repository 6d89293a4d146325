#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voltide/dates.hpp"
#include "voltide/forecast.hpp"

namespace voltide::strategy {

/// Net-volatility signal inputs and outputs for one day.
struct SignalState {
    double sigma_up_bar = 0.0;    ///< cross-asset mean upside component, day t
    double sigma_down_bar = 0.0;  ///< cross-asset mean downside component, day t
    double delta_up_hat = 0.0;    ///< predicted next-day change, average units
    double delta_down_hat = 0.0;
    double sigma_up_hat = 0.0;    ///< reconstructed forecasts, floored at 0
    double sigma_down_hat = 0.0;
    double sigma_daily_hat = 0.0;
    double signal = 0.0;          ///< (up - down) / (up + down), in [-1, 1]
    double z_score = 0.0;
    bool degenerate = false;      ///< total forecast zero after flooring
};

/// Builds the signal from realized averages and predicted changes:
/// forecasts floored at zero; a zero total forecast yields signal 0 with the
/// degenerate flag set.
SignalState net_volatility_signal(double sigma_up_bar, double sigma_down_bar,
                                  double delta_up_hat, double delta_down_hat);

/// Per-asset weights from the ratio of upside to downside first-component
/// loadings, normalized to sum to one. Throws DataError on a non-positive
/// loading.
std::vector<double> pc_ratio_weights(std::span<const double> loadings_up,
                                     std::span<const double> loadings_down);

/// sigma_target / (sigma_daily_hat * sqrt(days_per_year)).
double base_exposure(double sigma_daily_hat, double sigma_target, double days_per_year);

/// 1 + tanh(z), in (0, 2).
double confidence_multiplier(double z_score);

struct PerformanceSummary {
    double ann_return = 0.0;    ///< geometric
    double ann_vol = 0.0;
    double max_drawdown = 0.0;  ///< in [-1, 0]
    double sortino = 0.0;
    bool sortino_infinite = false;  ///< no strictly negative returns
};

/// Annualized metrics of a daily net-return series. Throws NumericError on
/// fewer than 2 returns.
PerformanceSummary performance_metrics(std::span<const double> net_returns,
                                       double days_per_year);

enum class Variant { benchmark, challenger, naive, buy_and_hold };

std::string variant_name(Variant v);

struct StrategyConfig {
    double sigma_target = 0.20;   ///< annual volatility target
    double cost_bp = 1.0;         ///< basis points per unit turnover
    double days_per_year = 366.0;
    int signal_window = 60;       ///< trailing window for the signal z-score
    int naive_trailing_days = 30;
};

/// Everything the daily loop needs for one out-of-sample day, assembled by
/// the expanding-window forecaster.
struct StrategyDay {
    Date date;
    double sigma_up_bar = 0.0;    ///< realized averages as of the previous close
    double sigma_down_bar = 0.0;
    double delta_up_benchmark = 0.0;  ///< predicted changes in average units
    double delta_down_benchmark = 0.0;
    double delta_up_challenger = 0.0;
    double delta_down_challenger = 0.0;
    std::vector<double> weights;       ///< loading-ratio weights as of the previous close
    std::vector<double> asset_returns; ///< close-to-close returns realized on this day
    double trailing_sigma_daily = 0.0; ///< trailing mean of realized daily volatility
};

struct LedgerRow {
    Date date;
    std::vector<double> weights;
    double exposure = 0.0;
    double gross_return = 0.0;  ///< exposure-weighted asset return
    double turnover = 0.0;
    double cost = 0.0;
    double net_return = 0.0;
    double equity = 1.0;
    double signal = 0.0;
    double multiplier = 1.0;
    bool degenerate = false;
};

struct StrategyLedger {
    Variant variant = Variant::benchmark;
    double sigma_target = 0.0;
    std::vector<LedgerRow> rows;
    PerformanceSummary summary;
    std::optional<forecast::StageFailure> failure;
};

/// Replays one variant's daily loop over precomputed day inputs:
/// position_t = exposure_t * w_t, cost = cost_bp * 1e-4 * sum |delta position|
/// (day 0 included), equity compounds on net returns.
StrategyLedger run_strategy_ledger(Variant variant, std::span<const StrategyDay> days,
                                   const StrategyConfig& cfg);

/// Assembles per-day inputs by running the expanding forecaster with the
/// four prediction tasks (benchmark and challenger, upside and downside).
/// `market` carries per-asset returns and realized volatility components on
/// the same date axis as `data`.
struct MarketDaily {
    std::vector<Date> dates;
    std::vector<std::string> asset_ids;
    std::vector<std::vector<double>> returns;     ///< [asset][t]
    std::vector<std::vector<double>> sigma_up;    ///< [asset][t]
    std::vector<std::vector<double>> sigma_down;  ///< [asset][t]
};

struct StrategyTaskSpec {
    std::string up_target;      ///< upside-volatility factor category
    std::string down_target;    ///< downside-volatility factor category
    std::string up_causer;      ///< challenger's extra factor for the upside model
    std::string down_causer;
};

std::vector<StrategyDay> collect_strategy_days(const forecast::FactorDataset& data,
                                               const MarketDaily& market,
                                               const StrategyTaskSpec& spec,
                                               const forecast::BacktestConfig& cfg,
                                               int naive_trailing_days);

}  // namespace voltide::strategy
