#include "voltide/config.hpp"

#include <fstream>

#include "voltide/errors.hpp"

namespace voltide::cli {

namespace {

template <typename T>
T field(const nlohmann::json& j, const std::string& name, const T& fallback) {
    if (!j.contains(name)) return fallback;
    try {
        return j.at(name).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config field '" + name + "' has an invalid type");
    }
}

Date date_field(const nlohmann::json& j, const std::string& name) {
    if (!j.contains(name)) throw ConfigError("config field '" + name + "' is required");
    try {
        return Date::parse(j.at(name).get<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError("config field '" + name + "': " + e.what());
    }
}

}  // namespace

std::vector<gbt::GbtHyperParams> RunConfig::gbt_grid() const {
    std::vector<gbt::GbtHyperParams> grid;
    for (const int depth : gbt_max_depth) {
        for (const double lr : gbt_learning_rate) {
            for (const int trees : gbt_n_trees) {
                for (const double sub : gbt_subsample) {
                    gbt::GbtHyperParams hp;
                    hp.max_depth = depth;
                    hp.learning_rate = lr;
                    hp.n_trees = trees;
                    hp.subsample = sub;
                    hp.min_samples_leaf = gbt_min_samples_leaf;
                    grid.push_back(hp);
                }
            }
        }
    }
    return grid;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;

    if (!j.contains("data")) throw ConfigError("config section 'data' is required");
    const auto& d = j.at("data");
    cfg.csv_dir = field<std::string>(d, "csv_dir", cfg.csv_dir);
    cfg.stablecoins = field<std::vector<std::string>>(d, "stablecoins", {});
    cfg.cryptos = field<std::vector<std::string>>(d, "cryptos", {});
    if (d.contains("column_map")) {
        const auto& m = d.at("column_map");
        cfg.schema.date = field<std::string>(m, "date", cfg.schema.date);
        cfg.schema.open = field<std::string>(m, "open", cfg.schema.open);
        cfg.schema.high = field<std::string>(m, "high", cfg.schema.high);
        cfg.schema.low = field<std::string>(m, "low", cfg.schema.low);
        cfg.schema.close = field<std::string>(m, "close", cfg.schema.close);
        cfg.schema.volume = field<std::string>(m, "volume", cfg.schema.volume);
    }
    if (cfg.stablecoins.empty()) throw ConfigError("config field 'data.stablecoins' is empty");
    if (cfg.cryptos.empty()) throw ConfigError("config field 'data.cryptos' is empty");

    if (!j.contains("dates")) throw ConfigError("config section 'dates' is required");
    const auto& dates = j.at("dates");
    cfg.train_start = date_field(dates, "train_start");
    cfg.train_end = date_field(dates, "train_end");
    cfg.test_end = date_field(dates, "test_end");
    if (!(cfg.train_start < cfg.train_end)) {
        throw ConfigError("config field 'dates.train_end' must come after train_start");
    }
    if (!(cfg.train_end < cfg.test_end)) {
        throw ConfigError("config field 'dates.test_end' must come after train_end");
    }

    if (j.contains("winsor")) {
        const auto& w = j.at("winsor");
        cfg.winsor_lower = field<double>(w, "lower", cfg.winsor_lower);
        cfg.winsor_upper = field<double>(w, "upper", cfg.winsor_upper);
    }
    if (!(cfg.winsor_lower >= 0.0 && cfg.winsor_lower < cfg.winsor_upper &&
          cfg.winsor_upper <= 1.0)) {
        throw ConfigError("config fields 'winsor.lower'/'winsor.upper' are not valid quantiles");
    }

    if (j.contains("cgc")) {
        const auto& c = j.at("cgc");
        cfg.cgc_horizons = field<std::vector<int>>(c, "horizons", cfg.cgc_horizons);
        cfg.cgc_n_bootstrap = field<int>(c, "n_bootstrap", cfg.cgc_n_bootstrap);
        cfg.cgc_percentile = field<double>(c, "percentile", cfg.cgc_percentile);
        cfg.cgc_bernstein_degree = field<int>(c, "bernstein_degree", cfg.cgc_bernstein_degree);
        cfg.cgc_block_length = field<double>(c, "block_length", cfg.cgc_block_length);
        cfg.cgc_both_directions = field<bool>(c, "both_directions", cfg.cgc_both_directions);
    }
    if (cfg.cgc_n_bootstrap < 100) {
        throw ConfigError("config field 'cgc.n_bootstrap' must be >= 100");
    }

    if (j.contains("gbt")) {
        const auto& g = j.at("gbt");
        cfg.gbt_max_depth = field<std::vector<int>>(g, "max_depth", cfg.gbt_max_depth);
        cfg.gbt_learning_rate =
            field<std::vector<double>>(g, "learning_rate", cfg.gbt_learning_rate);
        cfg.gbt_n_trees = field<std::vector<int>>(g, "n_trees", cfg.gbt_n_trees);
        cfg.gbt_subsample = field<std::vector<double>>(g, "subsample", cfg.gbt_subsample);
        cfg.gbt_min_samples_leaf = field<int>(g, "min_samples_leaf", cfg.gbt_min_samples_leaf);
        cfg.gbt_n_folds = field<int>(g, "n_folds", cfg.gbt_n_folds);
    }
    if (cfg.gbt_max_depth.empty() || cfg.gbt_learning_rate.empty() || cfg.gbt_n_trees.empty() ||
        cfg.gbt_subsample.empty()) {
        throw ConfigError("config section 'gbt' defines an empty grid");
    }

    if (j.contains("refit")) {
        const auto& r = j.at("refit");
        cfg.refit_cadence_days = field<int>(r, "model_cadence_days", cfg.refit_cadence_days);
        cfg.gbt_cadence_days = field<int>(r, "gbt_cadence_days", cfg.gbt_cadence_days);
    }
    if (cfg.refit_cadence_days < 1 || cfg.gbt_cadence_days < 1) {
        throw ConfigError("config section 'refit': cadences must be >= 1");
    }

    if (j.contains("horn")) {
        const auto& h = j.at("horn");
        cfg.horn_replicates = field<int>(h, "replicates", cfg.horn_replicates);
        cfg.horn_percentile = field<double>(h, "percentile", cfg.horn_percentile);
    }

    if (j.contains("strategy")) {
        const auto& s = j.at("strategy");
        cfg.sigma_targets = field<std::vector<double>>(s, "targets", cfg.sigma_targets);
        cfg.cost_bp = field<double>(s, "cost_bp", cfg.cost_bp);
        cfg.days_per_year = field<double>(s, "days_per_year", cfg.days_per_year);
        cfg.signal_window = field<int>(s, "signal_window", cfg.signal_window);
        cfg.naive_trailing_days = field<int>(s, "naive_trailing_days", cfg.naive_trailing_days);
    }
    if (cfg.sigma_targets.empty()) throw ConfigError("config field 'strategy.targets' is empty");
    if (cfg.cost_bp < 0.0) throw ConfigError("config field 'strategy.cost_bp' must be >= 0");

    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        cfg.sim.n_stablecoins = field<int>(s, "n_stablecoins", cfg.sim.n_stablecoins);
        cfg.sim.n_cryptos = field<int>(s, "n_cryptos", cfg.sim.n_cryptos);
        cfg.sim.start_date = field<std::string>(s, "start_date", cfg.sim.start_date);
        cfg.sim.n_days = field<int>(s, "n_days", cfg.sim.n_days);
        cfg.sim.vol_lead_coef = field<double>(s, "vol_lead_coef", cfg.sim.vol_lead_coef);
        cfg.sim.volume_lead_coef =
            field<double>(s, "volume_lead_coef", cfg.sim.volume_lead_coef);
        cfg.sim.intraday_steps = field<int>(s, "intraday_steps", cfg.sim.intraday_steps);
    }

    cfg.seed = field<std::uint64_t>(j, "seed", cfg.seed);
    cfg.out_dir = field<std::string>(j, "out_dir", cfg.out_dir);
    cfg.workers = field<std::size_t>(j, "workers", cfg.workers);
    cfg.adf_max_lag = field<int>(j, "adf_max_lag", cfg.adf_max_lag);
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config file does not parse as JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    return nlohmann::json{
        {"data",
         {{"csv_dir", cfg.csv_dir},
          {"column_map",
           {{"date", cfg.schema.date},
            {"open", cfg.schema.open},
            {"high", cfg.schema.high},
            {"low", cfg.schema.low},
            {"close", cfg.schema.close},
            {"volume", cfg.schema.volume}}},
          {"stablecoins", cfg.stablecoins},
          {"cryptos", cfg.cryptos}}},
        {"dates",
         {{"train_start", cfg.train_start.to_string()},
          {"train_end", cfg.train_end.to_string()},
          {"test_end", cfg.test_end.to_string()}}},
        {"winsor", {{"lower", cfg.winsor_lower}, {"upper", cfg.winsor_upper}}},
        {"cgc",
         {{"horizons", cfg.cgc_horizons},
          {"n_bootstrap", cfg.cgc_n_bootstrap},
          {"percentile", cfg.cgc_percentile},
          {"bernstein_degree", cfg.cgc_bernstein_degree},
          {"block_length", cfg.cgc_block_length},
          {"both_directions", cfg.cgc_both_directions}}},
        {"gbt",
         {{"max_depth", cfg.gbt_max_depth},
          {"learning_rate", cfg.gbt_learning_rate},
          {"n_trees", cfg.gbt_n_trees},
          {"subsample", cfg.gbt_subsample},
          {"min_samples_leaf", cfg.gbt_min_samples_leaf},
          {"n_folds", cfg.gbt_n_folds}}},
        {"refit",
         {{"model_cadence_days", cfg.refit_cadence_days},
          {"gbt_cadence_days", cfg.gbt_cadence_days}}},
        {"horn", {{"replicates", cfg.horn_replicates}, {"percentile", cfg.horn_percentile}}},
        {"strategy",
         {{"targets", cfg.sigma_targets},
          {"cost_bp", cfg.cost_bp},
          {"days_per_year", cfg.days_per_year},
          {"signal_window", cfg.signal_window},
          {"naive_trailing_days", cfg.naive_trailing_days}}},
        {"simulate",
         {{"n_stablecoins", cfg.sim.n_stablecoins},
          {"n_cryptos", cfg.sim.n_cryptos},
          {"start_date", cfg.sim.start_date},
          {"n_days", cfg.sim.n_days},
          {"vol_lead_coef", cfg.sim.vol_lead_coef},
          {"volume_lead_coef", cfg.sim.volume_lead_coef},
          {"intraday_steps", cfg.sim.intraday_steps}}},
        {"adf_max_lag", cfg.adf_max_lag},
        {"seed", cfg.seed},
        {"out_dir", cfg.out_dir},
        {"workers", cfg.workers},
    };
}

std::string config_hash(const RunConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace voltide::cli
