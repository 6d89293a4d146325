#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "voltide/dates.hpp"

namespace voltide::data {

/// One daily OHLCV bar. Prices strictly positive, low <= min(open, close),
/// high >= max(open, close).
struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;
};

/// Date-ordered daily bars for one asset on a gap-free calendar
/// (consecutive dates differ by exactly one day).
struct OhlcvSeries {
    std::string asset_id;
    std::vector<Bar> bars;
};

/// Daily upside/downside range volatility. The squares sum to the
/// full range-based variance of the bar by construction.
struct VolComponents {
    double sigma_up = 0.0;
    double sigma_down = 0.0;
};

enum class Metric { delta_log_volume, delta_sigma_up, delta_sigma_down };

std::string metric_name(Metric m);

/// A stationary transform of one asset's series: first difference of the
/// log volume or of a range-volatility component. One element shorter
/// than the raw series.
struct TransformedSeries {
    std::string asset_id;
    Metric metric = Metric::delta_log_volume;
    std::vector<Date> dates;
    std::vector<double> values;
};

/// Maps vendor column names onto the canonical schema.
struct CsvSchema {
    std::string date = "date";
    std::string open = "open";
    std::string high = "high";
    std::string low = "low";
    std::string close = "close";
    std::string volume = "volume";
};

/// Loads and validates one asset's daily bars from CSV. Rows are sorted by
/// date before validation. Throws DataError naming the offending row/date on
/// missing columns, unparsable numbers, calendar gaps, non-positive prices,
/// inverted ranges, or non-positive volume.
OhlcvSeries load_ohlcv_csv(const std::filesystem::path& path, const CsvSchema& schema,
                           const std::string& asset_id = "");

/// Validates the Bar invariants; throws DataError with `context` on failure.
void validate_bar(const Bar& bar, const std::string& context);

/// Validates serieswide invariants (ordering, calendar completeness).
void validate_series(const OhlcvSeries& series);

/// Range-based volatility split:
///   sigma_up   = sqrt(ln(H/C) ln(H/O))
///   sigma_down = sqrt(ln(L/C) ln(L/O))
/// Bar invariants guarantee non-negative radicands.
VolComponents rogers_satchell(const Bar& bar);

/// First differences: delta log volume and the deltas of both volatility
/// components. Requires at least 2 bars and strictly positive volume.
std::vector<TransformedSeries> transform(const OhlcvSeries& series);

/// Clips values outside the [lower_q, upper_q] empirical quantiles (linear
/// interpolation convention) to those quantiles. Order and length preserved.
std::vector<double> winsorize(std::span<const double> values, double lower_q, double upper_q);

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int lags_used = 0;
};

/// Augmented Dickey-Fuller test with constant term, lag order selected by
/// AIC up to max_lag, p-value from the MacKinnon response-surface
/// approximation. Throws NumericError on constant input or too-short series.
AdfResult adf_test(std::span<const double> values, int max_lag = 20);

}  // namespace voltide::data
