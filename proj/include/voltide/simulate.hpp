#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voltide/dates.hpp"
#include "voltide/market_data.hpp"

namespace voltide::sim {

/// Synthetic-market parameters. Two asset groups share latent volatility and
/// volume factors; the second group's factors respond to the first group's
/// with a one-day lead, the structure the pipeline is meant to detect.
struct SimConfig {
    int n_stablecoins = 3;
    int n_cryptos = 4;
    std::string start_date = "2020-01-01";
    int n_days = 1828;
    double vol_lead_coef = 0.6;     ///< stable vol factor -> next-day crypto vol factor
    double volume_lead_coef = 0.5;  ///< stable volume factor -> next-day crypto volume factor
    double stable_base_vol = 0.002; ///< typical daily volatility of the pegged group
    double crypto_base_vol = 0.03;
    double crypto_drift = 0.0015;   ///< daily log-price drift of the risky group
    int intraday_steps = 78;
    std::uint64_t seed = 42;
};

struct SimulatedMarket {
    std::vector<data::OhlcvSeries> stablecoins;
    std::vector<data::OhlcvSeries> cryptos;
};

/// Generates gap-free daily OHLCV bars by aggregating seeded intraday
/// random-walk paths whose daily variance follows the latent factors.
SimulatedMarket simulate_market(const SimConfig& cfg);

}  // namespace voltide::sim
