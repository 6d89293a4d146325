#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voltide/dates.hpp"
#include "voltide/market_data.hpp"

namespace voltide::factors {

/// Aligned panel of transformed series for one factor category
/// (one row per asset, identical date axis).
struct Panel {
    std::string category;
    std::vector<std::string> asset_ids;
    std::vector<Date> dates;
    std::vector<std::vector<double>> series;  ///< series[asset][t]
};

/// Builds a panel from per-asset transformed series, enforcing date alignment.
Panel make_panel(const std::string& category, const std::vector<data::TransformedSeries>& parts);

/// Correlation-matrix principal components of one standardized panel.
/// Loadings are unit-norm, eigenvalues descending, every component's loading
/// sign flipped so its loading sum is positive. `scores` are the first
/// component's date-indexed factor values.
struct PcaModel {
    std::string category;
    std::vector<std::string> asset_ids;
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<std::vector<double>> loadings;  ///< loadings[component][asset]
    std::vector<double> eigenvalues;
    std::vector<Date> dates;
    std::vector<double> scores;

    [[nodiscard]] const std::vector<double>& pc1() const { return loadings.front(); }
};

/// Z-scores each series and eigen-decomposes the correlation matrix.
/// Throws DataError on fewer than 2 series or a constant series.
PcaModel fit_pca(const Panel& panel);

/// First-component score of one cross-sectional observation (per-asset
/// values on a single date) under an existing model.
double project_pc1(const PcaModel& model, std::span<const double> row);

/// Flips component signs to maximize the dot product with a reference
/// first-component loading vector (keeps expanding-window refits from
/// flipping sign day over day).
void align_sign(PcaModel& model, std::span<const double> reference_pc1);

struct HornResult {
    std::vector<double> eigenvalues_observed;
    std::vector<double> eigenvalues_critical;
    std::vector<std::size_t> retained;
};

/// Retention by comparison against per-rank percentiles of eigenvalues from
/// standard-normal panels of identical shape. Replications use deterministic
/// per-replication seeds derived from `seed`.
HornResult horns_parallel_analysis(const Panel& panel, int n_random, double percentile,
                                   std::uint64_t seed);

}  // namespace voltide::factors
