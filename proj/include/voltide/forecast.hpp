#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voltide/dates.hpp"
#include "voltide/egarch.hpp"
#include "voltide/factors.hpp"
#include "voltide/gbt.hpp"

namespace voltide::forecast {

// ---------------------------------------------------------------------------
// Forecast-accuracy testing
// ---------------------------------------------------------------------------

struct DmReport {
    double dm_stat = 0.0;
    double dm_hln = 0.0;   ///< small-sample scaling sqrt((T-1)/T) at horizon 1
    double p_value = 1.0;  ///< one-sided (challenger better), Student-t with T-1 dof
    double mean_differential = 0.0;
    double se_differential = 0.0;
    bool degenerate = false;  ///< zero-variance differential; p forced to 1
    std::string adjustment = "none";
};

/// Equal-accuracy test on two loss series; the differential is
/// loss_benchmark - loss_challenger. Horizon must be 1 (one-day forecasts).
DmReport dm_test(std::span<const double> losses_benchmark,
                 std::span<const double> losses_challenger, int horizon = 1);

/// Nested-model variant: the differential subtracts the prediction-gap
/// square, e_B^2 - [e_C^2 - (yhat_B - yhat_C)^2].
DmReport dm_test_nested(std::span<const double> err_benchmark,
                        std::span<const double> err_challenger,
                        std::span<const double> pred_benchmark,
                        std::span<const double> pred_challenger, int horizon = 1);

// ---------------------------------------------------------------------------
// Feature construction
// ---------------------------------------------------------------------------

enum class Channel { uniform_residual, conditional_volatility };

std::string channel_name(Channel c);

struct FeatureSource {
    std::string factor_id;
    Channel channel = Channel::uniform_residual;
};

struct FeatureSpec {
    std::vector<FeatureSource> sources;
    std::vector<int> lags = {1, 7, 30};
    std::vector<int> moving_averages = {7, 30};

    [[nodiscard]] std::vector<std::string> feature_names() const;
    /// Stable content hash label; identical specs share derived seeds.
    [[nodiscard]] std::string fingerprint() const;
};

/// Per-factor channel series on the factor date axis. Index 0 is the filter
/// warm-up and holds NaN; feature windows never reach it when as_of >= 31.
struct ChannelSeries {
    std::vector<double> uniforms;
    std::vector<double> cond_vols;
};

/// One feature row at as_of: per source, values at the configured lags and
/// trailing means over the configured windows, all from data <= as_of.
/// Throws NumericError when as_of < 31 (insufficient history).
std::vector<double> build_features(const std::map<std::string, ChannelSeries>& channels,
                                   const FeatureSpec& spec, std::size_t as_of);

// ---------------------------------------------------------------------------
// Expanding-window pipeline
// ---------------------------------------------------------------------------

/// Aligned factor-category panels on a shared (transformed) date axis.
/// Training rows [0, train_len) are winsorized upstream; later rows are raw.
struct FactorDataset {
    std::vector<Date> dates;
    std::size_t train_len = 0;
    std::map<std::string, factors::Panel> categories;
};

struct BacktestConfig {
    int refit_cadence_days = 1;      ///< PCA + volatility-model refit cadence
    int gbt_cadence_days = 1;        ///< prediction-model refit cadence
    std::vector<gbt::GbtHyperParams> grid;
    int n_folds = 5;
    std::uint64_t master_seed = 0;
    std::string stage_label = "mse";
};

struct PredictionTask {
    std::string name;
    std::string target_category;
    FeatureSpec features;
};

/// Rolling state of one factor category inside the expanding window.
struct CategoryState {
    factors::PcaModel pca;
    garch::EgarchModel model;
    std::vector<double> scores;  ///< through as_of under the current pca
    ChannelSeries channels;
};

/// Drives the day-by-day loop shared by the error backtest and the trading
/// backtest: per task, refit factors and the volatility model on schedule,
/// map residuals to the unit interval, predict the next-day uniform with the
/// boosted trees, and reconstruct the next-day factor value.
class ExpandingForecaster {
public:
    ExpandingForecaster(const FactorDataset& data, std::vector<PredictionTask> tasks,
                        BacktestConfig cfg);

    struct TaskOutput {
        double y_hat = 0.0;        ///< reconstructed next-day factor value
        double u_hat = 0.0;        ///< predicted uniform residual
        double egarch_mean = 0.0;  ///< mean-equation-only forecast
    };

    struct DayResult {
        Date date;
        std::size_t day_index = 0;
        std::vector<TaskOutput> tasks;
        std::map<std::string, double> y_true;  ///< realized score per target category
    };

    [[nodiscard]] bool done() const;
    DayResult step();

    [[nodiscard]] const CategoryState& category(const std::string& id) const;
    [[nodiscard]] const gbt::GbtModel& task_model(std::size_t task) const;
    [[nodiscard]] const gbt::GbtHyperParams& task_hyperparams(std::size_t task) const;

private:
    void refit_category(const std::string& id, std::size_t as_of);
    void extend_category(const std::string& id, std::size_t idx);
    void ensure_state(std::size_t as_of, std::size_t day_index);

    const FactorDataset& data_;
    std::vector<PredictionTask> tasks_;
    BacktestConfig cfg_;
    std::map<std::string, CategoryState> states_;
    std::vector<gbt::GbtHyperParams> tuned_;
    std::vector<gbt::GbtModel> models_;
    std::vector<std::string> category_ids_;
    std::size_t next_day_ = 0;
    bool primed_ = false;
};

// ---------------------------------------------------------------------------
// Pairwise error backtest
// ---------------------------------------------------------------------------

struct ForecastRecord {
    Date date;
    double y_true = 0.0;
    double y_hat_benchmark = 0.0;
    double y_hat_challenger = 0.0;
    double e_benchmark = 0.0;
    double e_challenger = 0.0;
    double y_hat_egarch = 0.0;
};

struct StageFailure {
    Date date;
    std::string stage;
    std::string message;
};

struct MseBacktestResult {
    std::vector<ForecastRecord> records;
    double mse_benchmark = 0.0;
    double mse_challenger = 0.0;
    double mse_egarch = 0.0;
    double mse_reduction_pct = 0.0;            ///< 100 (1 - MSE_C / MSE_B)
    double mse_reduction_vs_egarch_pct = 0.0;
    DmReport dm_vs_benchmark;                  ///< Clark-West adjusted (nested)
    DmReport dm_vs_egarch;                     ///< unadjusted
    gbt::GbtHyperParams hp_benchmark;
    gbt::GbtHyperParams hp_challenger;
    std::vector<std::pair<std::string, double>> challenger_gains;  ///< descending
    garch::EgarchModel target_model;  ///< final fitted volatility model of the target factor
    garch::EgarchModel causer_model;
    std::optional<StageFailure> failure;
};

/// Benchmark (target-factor features only) against challenger (target plus
/// causer features) over the out-of-sample window. A stage failure is
/// recorded with its date and aborts with the partial records.
MseBacktestResult run_mse_backtest(const FactorDataset& data, const std::string& causer_category,
                                   const std::string& target_category, const BacktestConfig& cfg);

}  // namespace voltide::forecast
