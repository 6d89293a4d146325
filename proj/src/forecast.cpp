#include "voltide/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "voltide/errors.hpp"
#include "voltide/rng.hpp"
#include "voltide/stats.hpp"
#include "voltide/student_t.hpp"

namespace voltide::forecast {

namespace {

constexpr std::size_t kMinFeatureHistory = 31;
constexpr double kUniformClamp = 1e-6;

DmReport dm_core(std::span<const double> d, int horizon, const std::string& adjustment) {
    if (horizon != 1) throw NumericError("dm_test: only one-day horizons are supported");
    if (d.size() < 30) throw NumericError("dm_test: need at least 30 loss differentials");
    const auto t_len = static_cast<double>(d.size());

    DmReport rep;
    rep.adjustment = adjustment;
    rep.mean_differential = stats::mean(d);
    const double var = stats::variance(d);
    if (!(var > 0.0)) {
        rep.degenerate = true;
        rep.p_value = 1.0;
        return rep;
    }
    rep.se_differential = std::sqrt(var / t_len);
    rep.dm_stat = rep.mean_differential / rep.se_differential;
    rep.dm_hln = rep.dm_stat * std::sqrt((t_len - 1.0) / t_len);
    rep.p_value = 1.0 - dist::student_t_cdf(rep.dm_hln, t_len - 1.0);
    return rep;
}

}  // namespace

DmReport dm_test(std::span<const double> losses_benchmark,
                 std::span<const double> losses_challenger, int horizon) {
    if (losses_benchmark.size() != losses_challenger.size()) {
        throw NumericError("dm_test: loss series lengths differ");
    }
    std::vector<double> d(losses_benchmark.size());
    for (std::size_t t = 0; t < d.size(); ++t) {
        d[t] = losses_benchmark[t] - losses_challenger[t];
    }
    return dm_core(d, horizon, "none");
}

DmReport dm_test_nested(std::span<const double> err_benchmark,
                        std::span<const double> err_challenger,
                        std::span<const double> pred_benchmark,
                        std::span<const double> pred_challenger, int horizon) {
    const std::size_t n = err_benchmark.size();
    if (err_challenger.size() != n || pred_benchmark.size() != n || pred_challenger.size() != n) {
        throw NumericError("dm_test_nested: input lengths differ");
    }
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double gap = pred_benchmark[t] - pred_challenger[t];
        d[t] = err_benchmark[t] * err_benchmark[t] -
               (err_challenger[t] * err_challenger[t] - gap * gap);
    }
    return dm_core(d, horizon, "clark_west");
}

std::string channel_name(Channel c) {
    return c == Channel::uniform_residual ? "uniform" : "condvol";
}

std::vector<std::string> FeatureSpec::feature_names() const {
    std::vector<std::string> names;
    for (const auto& src : sources) {
        const std::string base = src.factor_id + "_" + channel_name(src.channel);
        for (const int lag : lags) names.push_back(base + "_lag" + std::to_string(lag));
        for (const int w : moving_averages) names.push_back(base + "_ma" + std::to_string(w));
    }
    return names;
}

std::string FeatureSpec::fingerprint() const {
    std::string s;
    for (const auto& n : feature_names()) {
        s += n;
        s += ';';
    }
    return s;
}

std::vector<double> build_features(const std::map<std::string, ChannelSeries>& channels,
                                   const FeatureSpec& spec, std::size_t as_of) {
    if (as_of < kMinFeatureHistory) {
        throw NumericError("build_features: insufficient history before as_of");
    }
    std::vector<double> row;
    row.reserve(spec.sources.size() * (spec.lags.size() + spec.moving_averages.size()));
    for (const auto& src : spec.sources) {
        const auto it = channels.find(src.factor_id);
        if (it == channels.end()) {
            throw NumericError("build_features: unknown factor '" + src.factor_id + "'");
        }
        const auto& series = src.channel == Channel::uniform_residual ? it->second.uniforms
                                                                      : it->second.cond_vols;
        if (as_of >= series.size()) {
            throw NumericError("build_features: as_of beyond available history");
        }
        for (const int lag : spec.lags) {
            if (static_cast<std::size_t>(lag) > as_of) {
                throw NumericError("build_features: lag exceeds history");
            }
            row.push_back(series[as_of - static_cast<std::size_t>(lag)]);
        }
        for (const int w : spec.moving_averages) {
            if (static_cast<std::size_t>(w) > as_of + 1) {
                throw NumericError("build_features: window exceeds history");
            }
            double s = 0.0;
            for (std::size_t t = as_of + 1 - static_cast<std::size_t>(w); t <= as_of; ++t) {
                s += series[t];
            }
            row.push_back(s / w);
        }
    }
    return row;
}

// ---------------------------------------------------------------------------
// ExpandingForecaster
// ---------------------------------------------------------------------------

namespace {

factors::Panel slice_panel(const factors::Panel& full, std::size_t len) {
    factors::Panel p;
    p.category = full.category;
    p.asset_ids = full.asset_ids;
    p.dates.assign(full.dates.begin(), full.dates.begin() + static_cast<std::ptrdiff_t>(len));
    p.series.reserve(full.series.size());
    for (const auto& s : full.series) {
        p.series.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(len));
    }
    return p;
}

std::vector<double> panel_row(const factors::Panel& full, std::size_t idx) {
    std::vector<double> row(full.series.size());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = full.series[i][idx];
    return row;
}

}  // namespace

ExpandingForecaster::ExpandingForecaster(const FactorDataset& data,
                                         std::vector<PredictionTask> tasks, BacktestConfig cfg)
    : data_(data), tasks_(std::move(tasks)), cfg_(std::move(cfg)) {
    if (data_.train_len < 250) {
        throw NumericError("expanding forecaster: training window too short");
    }
    if (data_.train_len + 1 >= data_.dates.size()) {
        throw NumericError("expanding forecaster: no out-of-sample days");
    }
    if (cfg_.refit_cadence_days < 1 || cfg_.gbt_cadence_days < 1) {
        throw NumericError("expanding forecaster: cadences must be >= 1");
    }

    for (const auto& task : tasks_) {
        const auto add = [&](const std::string& id) {
            if (!data_.categories.count(id)) {
                throw NumericError("expanding forecaster: unknown category '" + id + "'");
            }
            if (std::find(category_ids_.begin(), category_ids_.end(), id) ==
                category_ids_.end()) {
                category_ids_.push_back(id);
            }
        };
        add(task.target_category);
        for (const auto& src : task.features.sources) add(src.factor_id);
    }

    next_day_ = data_.train_len;
    models_.resize(tasks_.size());
    tuned_.resize(tasks_.size());
}

void ExpandingForecaster::refit_category(const std::string& id, std::size_t as_of) {
    auto& st = states_[id];
    const auto& full = data_.categories.at(id);
    const bool warm = !st.scores.empty();

    auto pca = factors::fit_pca(slice_panel(full, as_of + 1));
    if (warm) {
        factors::align_sign(pca, st.pca.pc1());
    }
    std::optional<garch::EgarchParams> warm_params;
    if (warm) warm_params = st.model.params;
    st.scores = pca.scores;
    st.pca = std::move(pca);

    st.model = garch::fit_egarch(
        st.scores, rng::derive_seed(cfg_.master_seed, cfg_.stage_label + ":egarch:" + id, as_of),
        warm_params);

    const std::size_t n = st.scores.size();
    st.channels.uniforms.assign(n, std::numeric_limits<double>::quiet_NaN());
    st.channels.cond_vols.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 1; t < n; ++t) {
        st.channels.uniforms[t] = garch::pit(st.model.state.residuals[t - 1], st.model.params.dist);
        st.channels.cond_vols[t] = st.model.state.cond_vols[t - 1];
    }
}

void ExpandingForecaster::extend_category(const std::string& id, std::size_t idx) {
    auto& st = states_[id];
    const double score = factors::project_pc1(st.pca, panel_row(data_.categories.at(id), idx));
    st.scores.push_back(score);
    garch::extend_filter(st.model.params, st.model.state, std::span<const double>(&score, 1));
    st.channels.uniforms.push_back(
        garch::pit(st.model.state.residuals.back(), st.model.params.dist));
    st.channels.cond_vols.push_back(st.model.state.cond_vols.back());
}

void ExpandingForecaster::ensure_state(std::size_t as_of, std::size_t day_index) {
    const bool refit_day =
        !primed_ || (day_index - data_.train_len) % static_cast<std::size_t>(
                                                        cfg_.refit_cadence_days) == 0;
    for (const auto& id : category_ids_) {
        if (refit_day) {
            refit_category(id, as_of);
        } else {
            extend_category(id, as_of);
        }
    }
    primed_ = true;
}

bool ExpandingForecaster::done() const { return next_day_ >= data_.dates.size(); }

ExpandingForecaster::DayResult ExpandingForecaster::step() {
    if (done()) throw NumericError("expanding forecaster: stepped past the last day");
    const std::size_t d = next_day_++;
    const std::size_t as_of = d - 1;
    ensure_state(as_of, d);

    std::map<std::string, ChannelSeries> channel_view;
    for (const auto& id : category_ids_) channel_view[id] = states_.at(id).channels;

    DayResult out;
    out.date = data_.dates[d];
    out.day_index = d;
    out.tasks.resize(tasks_.size());

    const bool gbt_day = (d - data_.train_len) % static_cast<std::size_t>(cfg_.gbt_cadence_days) ==
                         0;
    for (std::size_t k = 0; k < tasks_.size(); ++k) {
        const auto& task = tasks_[k];
        const auto& target = states_.at(task.target_category);
        const std::string scope =
            cfg_.stage_label + ":gbt:" + task.target_category + ":" + task.features.fingerprint();

        if (models_[k].trees.empty() && d == data_.train_len) {
            // Hyperparameter selection on the initial training window only.
            gbt::FeatureMatrix x;
            x.names = task.features.feature_names();
            x.columns.assign(x.names.size(), {});
            std::vector<double> y;
            for (std::size_t t = kMinFeatureHistory; t + 1 <= as_of; ++t) {
                const auto row = build_features(channel_view, task.features, t);
                for (std::size_t f = 0; f < row.size(); ++f) x.columns[f].push_back(row[f]);
                y.push_back(target.channels.uniforms[t + 1]);
            }
            auto grid = cfg_.grid;
            if (grid.empty()) grid.push_back(gbt::GbtHyperParams{});
            for (auto& hp : grid) {
                hp.seed = rng::derive_seed(cfg_.master_seed, scope + ":tune", 0);
            }
            tuned_[k] = gbt::tune(x, y, grid, cfg_.n_folds);
        }

        if (gbt_day || models_[k].trees.empty()) {
            gbt::FeatureMatrix x;
            x.names = task.features.feature_names();
            x.columns.assign(x.names.size(), {});
            std::vector<double> y;
            for (std::size_t t = kMinFeatureHistory; t + 1 <= as_of; ++t) {
                const auto row = build_features(channel_view, task.features, t);
                for (std::size_t f = 0; f < row.size(); ++f) x.columns[f].push_back(row[f]);
                y.push_back(target.channels.uniforms[t + 1]);
            }
            auto hp = tuned_[k];
            hp.seed = rng::derive_seed(cfg_.master_seed, scope, d);
            models_[k] = gbt::fit_gbt(x, y, hp);
        }

        gbt::FeatureMatrix x_now;
        x_now.names = task.features.feature_names();
        const auto row = build_features(channel_view, task.features, as_of);
        x_now.columns.resize(row.size());
        for (std::size_t f = 0; f < row.size(); ++f) x_now.columns[f] = {row[f]};

        double u_hat = gbt::predict(models_[k], x_now)[0];
        u_hat = std::clamp(u_hat, kUniformClamp, 1.0 - kUniformClamp);

        const auto fc = garch::forecast_one_step(target.model.params, target.model.state);
        const double z_hat = garch::inverse_pit(u_hat, target.model.params.dist);
        out.tasks[k].u_hat = u_hat;
        out.tasks[k].egarch_mean = fc.mean;
        out.tasks[k].y_hat = fc.mean + fc.sigma * z_hat;
    }

    for (const auto& task : tasks_) {
        if (out.y_true.count(task.target_category)) continue;
        const auto& st = states_.at(task.target_category);
        out.y_true[task.target_category] =
            factors::project_pc1(st.pca, panel_row(data_.categories.at(task.target_category), d));
    }
    return out;
}

const CategoryState& ExpandingForecaster::category(const std::string& id) const {
    return states_.at(id);
}

const gbt::GbtModel& ExpandingForecaster::task_model(std::size_t task) const {
    return models_.at(task);
}

const gbt::GbtHyperParams& ExpandingForecaster::task_hyperparams(std::size_t task) const {
    return tuned_.at(task);
}

// ---------------------------------------------------------------------------
// run_mse_backtest
// ---------------------------------------------------------------------------

namespace {

FeatureSpec spec_for(const std::vector<std::string>& factor_ids) {
    FeatureSpec spec;
    std::vector<std::string> seen;
    for (const auto& id : factor_ids) {
        if (std::find(seen.begin(), seen.end(), id) != seen.end()) continue;
        seen.push_back(id);
        spec.sources.push_back({id, Channel::uniform_residual});
        spec.sources.push_back({id, Channel::conditional_volatility});
    }
    return spec;
}

double mse_of(const std::vector<double>& e) {
    double s = 0.0;
    for (const double v : e) s += v * v;
    return s / static_cast<double>(e.size());
}

}  // namespace

MseBacktestResult run_mse_backtest(const FactorDataset& data, const std::string& causer_category,
                                   const std::string& target_category,
                                   const BacktestConfig& cfg) {
    std::vector<PredictionTask> tasks;
    tasks.push_back({"benchmark", target_category, spec_for({target_category})});
    tasks.push_back({"challenger", target_category, spec_for({target_category, causer_category})});

    MseBacktestResult res;
    ExpandingForecaster engine(data, tasks, cfg);

    while (!engine.done()) {
        try {
            const auto day = engine.step();
            ForecastRecord rec;
            rec.date = day.date;
            rec.y_true = day.y_true.at(target_category);
            rec.y_hat_benchmark = day.tasks[0].y_hat;
            rec.y_hat_challenger = day.tasks[1].y_hat;
            rec.y_hat_egarch = day.tasks[0].egarch_mean;
            rec.e_benchmark = rec.y_true - rec.y_hat_benchmark;
            rec.e_challenger = rec.y_true - rec.y_hat_challenger;
            res.records.push_back(rec);
        } catch (const std::exception& e) {
            const std::size_t idx = std::min(data.train_len + res.records.size(),
                                             data.dates.size() - 1);
            res.failure = StageFailure{data.dates[idx], "forecast", e.what()};
            break;
        }
    }

    if (res.records.empty()) return res;

    const std::size_t n = res.records.size();
    std::vector<double> e_b(n), e_c(n), p_b(n), p_c(n), e_e(n), l_b(n), l_c(n), l_e(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& r = res.records[t];
        e_b[t] = r.e_benchmark;
        e_c[t] = r.e_challenger;
        p_b[t] = r.y_hat_benchmark;
        p_c[t] = r.y_hat_challenger;
        e_e[t] = r.y_true - r.y_hat_egarch;
        l_b[t] = e_b[t] * e_b[t];
        l_c[t] = e_c[t] * e_c[t];
        l_e[t] = e_e[t] * e_e[t];
    }
    res.mse_benchmark = mse_of(e_b);
    res.mse_challenger = mse_of(e_c);
    res.mse_egarch = mse_of(e_e);
    res.mse_reduction_pct = 100.0 * (1.0 - res.mse_challenger / res.mse_benchmark);
    res.mse_reduction_vs_egarch_pct = 100.0 * (1.0 - res.mse_challenger / res.mse_egarch);
    if (n >= 30) {
        res.dm_vs_benchmark = dm_test_nested(e_b, e_c, p_b, p_c);
        res.dm_vs_egarch = dm_test(l_e, l_c);
    }
    res.hp_benchmark = engine.task_hyperparams(0);
    res.hp_challenger = engine.task_hyperparams(1);
    res.target_model = engine.category(target_category).model;
    res.causer_model = engine.category(causer_category).model;

    const auto& model = engine.task_model(1);
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
        res.challenger_gains.emplace_back(model.feature_names[f], model.gain_by_feature[f]);
    }
    std::sort(res.challenger_gains.begin(), res.challenger_gains.end(),
              [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second > b.second : a.first < b.first;
              });
    return res;
}

}  // namespace voltide::forecast
