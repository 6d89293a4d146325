#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "voltide/cgc.hpp"
#include "voltide/dates.hpp"
#include "voltide/gbt.hpp"
#include "voltide/market_data.hpp"
#include "voltide/simulate.hpp"

namespace voltide::cli {

/// One run's full configuration; every stage draws its parameters (and its
/// named sub-seeds) from here.
struct RunConfig {
    // data
    std::string csv_dir = "data";
    data::CsvSchema schema;
    std::vector<std::string> stablecoins;
    std::vector<std::string> cryptos;

    // date ranges (inclusive)
    Date train_start;
    Date train_end;
    Date test_end;

    // preprocessing
    double winsor_lower = 0.01;
    double winsor_upper = 0.99;
    int adf_max_lag = 20;

    // causality stage
    std::vector<int> cgc_horizons = {1, 7, 30};
    int cgc_n_bootstrap = 200;
    double cgc_percentile = 0.95;
    int cgc_bernstein_degree = 0;  // 0 = automatic
    double cgc_block_length = 20.0;
    bool cgc_both_directions = true;

    // prediction-model grid
    std::vector<int> gbt_max_depth = {2, 3, 4};
    std::vector<double> gbt_learning_rate = {0.05, 0.1};
    std::vector<int> gbt_n_trees = {100, 300};
    std::vector<double> gbt_subsample = {0.8, 1.0};
    int gbt_min_samples_leaf = 5;
    int gbt_n_folds = 5;

    // expanding-window cadences
    int refit_cadence_days = 1;
    int gbt_cadence_days = 1;

    // factor retention diagnostics
    int horn_replicates = 200;
    double horn_percentile = 0.95;

    // strategy stage
    std::vector<double> sigma_targets = {0.20, 0.50};
    double cost_bp = 1.0;
    double days_per_year = 366.0;
    int signal_window = 60;
    int naive_trailing_days = 30;

    // synthetic fixtures
    sim::SimConfig sim;

    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::size_t workers = 0;

    [[nodiscard]] std::vector<gbt::GbtHyperParams> gbt_grid() const;
};

/// Parses and validates; throws ConfigError naming the offending field.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config_file(const std::filesystem::path& path);

/// Canonical round-trip form (drives the manifest's config hash).
nlohmann::json config_to_json(const RunConfig& cfg);

/// FNV-1a hash of the canonical dump, as hex.
std::string config_hash(const RunConfig& cfg);

}  // namespace voltide::cli
