#include "voltide/simulate.hpp"

#include <cmath>

#include "voltide/errors.hpp"
#include "voltide/rng.hpp"

namespace voltide::sim {

namespace {

// AR(1) latent factor path with unit innovations scaled by `noise`.
std::vector<double> ar1_path(std::size_t n, double rho, double noise, rng::Rng& gen) {
    std::vector<double> x(n);
    x[0] = noise / std::sqrt(1.0 - rho * rho) * gen.normal();
    for (std::size_t t = 1; t < n; ++t) x[t] = rho * x[t - 1] + noise * gen.normal();
    return x;
}

data::OhlcvSeries simulate_asset(const std::string& id, Date start, std::size_t n_days,
                                 double base_vol, double drift, double start_price,
                                 const std::vector<double>& vol_factor,
                                 const std::vector<double>& volume_factor, double factor_load,
                                 double idio_vol_noise, int intraday_steps, rng::Rng& gen) {
    data::OhlcvSeries series;
    series.asset_id = id;
    series.bars.reserve(n_days);

    double log_close = std::log(start_price);
    double idio_vol = 0.0;
    double log_volume_idio = 0.0;
    const double base_log_volume = gen.uniform(12.0, 16.0);

    for (std::size_t t = 0; t < n_days; ++t) {
        idio_vol = 0.8 * idio_vol + idio_vol_noise * gen.normal();
        const double sd_day = base_vol * std::exp(0.5 * (factor_load * vol_factor[t] + idio_vol));

        const double log_open = log_close;  // continuous trading: open = previous close
        double x = log_open;
        double hi = x;
        double lo = x;
        const double step_sd = sd_day / std::sqrt(static_cast<double>(intraday_steps));
        const double step_drift = drift / static_cast<double>(intraday_steps);
        for (int s = 0; s < intraday_steps; ++s) {
            x += step_drift + step_sd * gen.normal();
            hi = std::max(hi, x);
            lo = std::min(lo, x);
        }
        log_close = x;

        log_volume_idio = 0.6 * log_volume_idio + 0.35 * gen.normal();
        const double volume =
            std::exp(base_log_volume + 0.8 * volume_factor[t] + log_volume_idio);

        data::Bar bar;
        bar.date = start + static_cast<std::int64_t>(t);
        bar.open = std::exp(log_open);
        bar.high = std::exp(hi);
        bar.low = std::exp(lo);
        bar.close = std::exp(log_close);
        bar.volume = volume;
        series.bars.push_back(bar);
    }
    return series;
}

}  // namespace

SimulatedMarket simulate_market(const SimConfig& cfg) {
    if (cfg.n_stablecoins < 2 || cfg.n_cryptos < 2) {
        throw DataError("simulate_market: need at least 2 assets per group");
    }
    if (cfg.n_days < 120) throw DataError("simulate_market: need at least 120 days");
    if (cfg.intraday_steps < 4) throw DataError("simulate_market: too few intraday steps");

    const Date start = Date::parse(cfg.start_date);
    const auto n = static_cast<std::size_t>(cfg.n_days);

    rng::Rng factor_gen(rng::derive_seed(cfg.seed, "sim:factors"));
    const auto stable_vol = ar1_path(n, 0.7, 0.5, factor_gen);
    const auto stable_volume = ar1_path(n, 0.6, 0.5, factor_gen);

    // The risky group's factors inherit yesterday's stable factor levels.
    std::vector<double> crypto_vol(n), crypto_volume(n);
    crypto_vol[0] = 0.5 * factor_gen.normal();
    crypto_volume[0] = 0.5 * factor_gen.normal();
    for (std::size_t t = 1; t < n; ++t) {
        crypto_vol[t] = 0.55 * crypto_vol[t - 1] + cfg.vol_lead_coef * stable_vol[t - 1] +
                        0.35 * factor_gen.normal();
        crypto_volume[t] = 0.5 * crypto_volume[t - 1] +
                           cfg.volume_lead_coef * stable_volume[t - 1] +
                           0.35 * factor_gen.normal();
    }

    SimulatedMarket market;
    for (int i = 0; i < cfg.n_stablecoins; ++i) {
        rng::Rng gen(rng::derive_seed(cfg.seed, "sim:stable", static_cast<std::uint64_t>(i)));
        market.stablecoins.push_back(simulate_asset(
            "SIM-S" + std::to_string(i + 1), start, n, cfg.stable_base_vol, 0.0, 1.0,
            stable_vol, stable_volume, 0.9, 0.25, cfg.intraday_steps, gen));
    }
    for (int i = 0; i < cfg.n_cryptos; ++i) {
        rng::Rng gen(rng::derive_seed(cfg.seed, "sim:crypto", static_cast<std::uint64_t>(i)));
        const double price = 50.0 * std::pow(10.0, i % 3);
        market.cryptos.push_back(simulate_asset(
            "SIM-C" + std::to_string(i + 1), start, n, cfg.crypto_base_vol, cfg.crypto_drift,
            price, crypto_vol, crypto_volume, 0.9, 0.25, cfg.intraday_steps, gen));
    }
    return market;
}

}  // namespace voltide::sim
