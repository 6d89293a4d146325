#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "voltide/config.hpp"
#include "voltide/forecast.hpp"
#include "voltide/strategy.hpp"

namespace voltide::cli {

/// Everything the modeling stages consume, assembled once per run: the six
/// factor-category panels (training rows winsorized, test rows raw) plus the
/// portfolio assets' returns and realized volatility components on the same
/// transformed date axis.
struct PreparedData {
    forecast::FactorDataset dataset;
    strategy::MarketDaily market;
    /// Unwinsorized transformed series per asset (ingest reports).
    std::vector<data::TransformedSeries> raw_transforms;
};

/// Loads the configured CSVs, validates them, restricts to the configured
/// date range and builds the factor panels.
PreparedData prepare_data(const RunConfig& cfg);

// Stage runners; each writes its artifacts under <out>/<stage>/.
void stage_simulate(const RunConfig& cfg);
void stage_ingest(const RunConfig& cfg, const PreparedData& prep);
void stage_factors(const RunConfig& cfg, const PreparedData& prep);
void stage_cgc(const RunConfig& cfg, const PreparedData* prep);
void stage_mse(const RunConfig& cfg, const PreparedData& prep);
void stage_strategy(const RunConfig& cfg, const PreparedData& prep);
void write_manifest(const RunConfig& cfg);

/// Factor-category identifiers used across stages.
inline const std::vector<std::string>& category_ids() {
    static const std::vector<std::string> ids{"stable_volume", "stable_up", "stable_down",
                                              "crypto_volume", "crypto_up", "crypto_down"};
    return ids;
}

/// Executes one CLI command; returns the process exit code
/// (0 ok, 2 config error, 3 data validation error, 4 numerical failure).
int run_command(const std::string& command, const RunConfig& cfg);

/// Full argv-level entry point: parses flags, loads the config, applies
/// --seed/--out and the VOLTIDE_OUT environment override.
int cli_main(int argc, const char* const* argv);

}  // namespace voltide::cli
