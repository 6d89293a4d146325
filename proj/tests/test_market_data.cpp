#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "voltide/errors.hpp"
#include "voltide/market_data.hpp"
#include "voltide/rng.hpp"
#include "voltide/stats.hpp"

using namespace voltide;
namespace fs = std::filesystem;

namespace {

fs::path write_temp_csv(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "voltide_tests";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << content;
    return p;
}

data::Bar make_bar(const std::string& date, double o, double h, double l, double c, double v) {
    return {Date::parse(date), o, h, l, c, v};
}

}  // namespace

TEST_CASE("well-formed csv loads as a validated series") {
    const auto p = write_temp_csv("ok.csv",
                                  "date,open,high,low,close,volume\n"
                                  "2024-01-03,10,11,9,10.5,100\n"
                                  "2024-01-01,10,11,9,10.5,100\n"
                                  "2024-01-02,10.5,12,10,11,150\n"
                                  "2024-01-04,10.5,12,10,11,150\n"
                                  "2024-01-05,11,11,10,10.2,90\n");
    const auto series = data::load_ohlcv_csv(p, {}, "TEST");
    REQUIRE(series.bars.size() == 5);
    CHECK(series.bars.front().date.to_string() == "2024-01-01");
    CHECK(series.bars.back().date.to_string() == "2024-01-05");
    CHECK(series.bars[1].volume == doctest::Approx(150.0));
}

TEST_CASE("calendar gap is a hard load error naming the date") {
    const auto p = write_temp_csv("gap.csv",
                                  "date,open,high,low,close,volume\n"
                                  "2024-01-01,10,11,9,10.5,100\n"
                                  "2024-01-02,10.5,12,10,11,150\n"
                                  "2024-01-04,11,11,10,10.2,90\n");
    CHECK_THROWS_WITH_AS(data::load_ohlcv_csv(p, {}, "TEST"),
                         doctest::Contains("2024-01-02"), DataError);
}

TEST_CASE("high below close is a validation error carrying the row index") {
    const auto p = write_temp_csv("badrow.csv",
                                  "date,open,high,low,close,volume\n"
                                  "2024-01-01,10,11,9,10.5,100\n"
                                  "2024-01-02,10.5,10.8,10,11,150\n");
    CHECK_THROWS_WITH_AS(data::load_ohlcv_csv(p, {}, "TEST"), doctest::Contains("row 2"),
                         DataError);
}

TEST_CASE("missing column and zero volume are load errors") {
    const auto p1 = write_temp_csv("nocol.csv", "date,open,high,low,close\n");
    CHECK_THROWS_AS(data::load_ohlcv_csv(p1, {}, "TEST"), DataError);

    const auto p2 = write_temp_csv("zerovol.csv",
                                   "date,open,high,low,close,volume\n"
                                   "2024-01-01,10,11,9,10.5,0\n");
    CHECK_THROWS_WITH_AS(data::load_ohlcv_csv(p2, {}, "TEST"), doctest::Contains("zero volume"),
                         DataError);
}

TEST_CASE("column mapping adapts vendor headers") {
    const auto p = write_temp_csv("vendor.csv",
                                  "Date,Open,High,Low,Price,Vol\n"
                                  "2024-01-01,10,11,9,10.5,100\n");
    data::CsvSchema schema;
    schema.date = "Date";
    schema.open = "Open";
    schema.high = "High";
    schema.low = "Low";
    schema.close = "Price";
    schema.volume = "Vol";
    const auto series = data::load_ohlcv_csv(p, schema, "V");
    CHECK(series.bars.size() == 1);
}

TEST_CASE("zero-range day has zero volatility components") {
    const auto v = data::rogers_satchell(make_bar("2024-01-01", 100, 100, 100, 100, 1));
    CHECK(v.sigma_up == 0.0);
    CHECK(v.sigma_down == 0.0);
}

TEST_CASE("open-at-high close-at-low bar has vanishing boundary terms") {
    const auto v = data::rogers_satchell(make_bar("2024-01-01", 110, 110, 95, 95, 1));
    CHECK(v.sigma_up == 0.0);
    CHECK(v.sigma_down == 0.0);
}

TEST_CASE("volatility components match direct high-precision evaluation") {
    const auto v = data::rogers_satchell(make_bar("2024-01-01", 100, 110, 95, 105, 1));
    // Direct long-double evaluation of the two terms, cross-checked at 30
    // significant digits externally.
    const long double up =
        sqrtl(logl(110.0L / 105.0L) * logl(110.0L / 100.0L));
    const long double down =
        sqrtl(logl(95.0L / 105.0L) * logl(95.0L / 100.0L));
    CHECK(v.sigma_up == doctest::Approx(static_cast<double>(up)).epsilon(1e-14));
    CHECK(v.sigma_down == doctest::Approx(static_cast<double>(down)).epsilon(1e-14));
    CHECK(v.sigma_up == doctest::Approx(0.066587018664764).epsilon(1e-12));
    CHECK(v.sigma_down == doctest::Approx(0.071649217044484).epsilon(1e-12));
}

TEST_CASE("squared components reconstruct the full range variance") {
    rng::Rng gen(rng::derive_seed(11, "test:rs-identity"));
    for (int i = 0; i < 200; ++i) {
        const double o = std::exp(gen.normal(0.0, 0.3)) * 50.0;
        const double c = o * std::exp(gen.normal(0.0, 0.05));
        const double h = std::max(o, c) * std::exp(std::abs(gen.normal(0.0, 0.03)));
        const double l = std::min(o, c) * std::exp(-std::abs(gen.normal(0.0, 0.03)));
        const data::Bar bar{Date(0), o, h, l, c, 1.0};
        const auto v = data::rogers_satchell(bar);
        const double variance = std::log(h / c) * std::log(h / o) +
                                std::log(l / c) * std::log(l / o);
        CHECK(v.sigma_up * v.sigma_up + v.sigma_down * v.sigma_down ==
              doctest::Approx(variance).epsilon(1e-13));
    }
}

TEST_CASE("range variance is consistent on simulated driftless geometric brownian motion") {
    rng::Rng gen(rng::derive_seed(11, "test:rs-gbm"));
    const int days = 2500;
    const int steps = 2000;
    const double daily_var = 4e-4;
    const double step_sd = std::sqrt(daily_var / steps);
    double sum = 0.0;
    for (int d = 0; d < days; ++d) {
        double x = 0.0;
        double hi = 0.0;
        double lo = 0.0;
        for (int s = 0; s < steps; ++s) {
            x += step_sd * gen.normal();
            hi = std::max(hi, x);
            lo = std::min(lo, x);
        }
        const data::Bar bar{Date(d), 100.0, 100.0 * std::exp(hi), 100.0 * std::exp(lo),
                            100.0 * std::exp(x), 1.0};
        const auto v = data::rogers_satchell(bar);
        sum += v.sigma_up * v.sigma_up + v.sigma_down * v.sigma_down;
    }
    const double mean_var = sum / days;
    CHECK(std::abs(mean_var / daily_var - 1.0) < 0.05);
}

TEST_CASE("transform differences volume and volatility") {
    data::OhlcvSeries series;
    series.asset_id = "T";
    series.bars = {make_bar("2024-01-01", 10, 11, 9, 10.5, 100),
                   make_bar("2024-01-02", 10.5, 12, 10, 11, 200),
                   make_bar("2024-01-03", 11, 12.5, 10.5, 11.5, 200)};
    const auto out = data::transform(series);
    REQUIRE(out.size() == 3);
    const auto& dv = out[0];
    CHECK(dv.metric == data::Metric::delta_log_volume);
    REQUIRE(dv.values.size() == 2);
    CHECK(dv.values[0] == doctest::Approx(0.6931471805599453).epsilon(1e-14));
    CHECK(dv.values[1] == doctest::Approx(0.0));
    CHECK(dv.dates[0].to_string() == "2024-01-02");
}

TEST_CASE("identical bars produce zero volatility differences") {
    data::OhlcvSeries series;
    series.asset_id = "T";
    series.bars = {make_bar("2024-01-01", 10, 11, 9, 10.5, 100),
                   make_bar("2024-01-02", 10, 11, 9, 10.5, 100)};
    const auto out = data::transform(series);
    CHECK(out[1].values[0] == doctest::Approx(0.0));
    CHECK(out[2].values[0] == doctest::Approx(0.0));
    CHECK(out[0].values[0] == doctest::Approx(0.0));
}

TEST_CASE("cumulative sum of delta log volume recovers log volume up to a constant") {
    rng::Rng gen(rng::derive_seed(11, "test:cumsum"));
    data::OhlcvSeries series;
    series.asset_id = "T";
    std::vector<double> logv;
    for (int i = 0; i < 50; ++i) {
        const double v = std::exp(gen.normal(4.0, 0.6));
        series.bars.push_back(make_bar(Date(19000 + i).to_string(), 10, 11, 9, 10.5, v));
        logv.push_back(std::log(v));
    }
    const auto dv = data::transform(series)[0];
    double acc = logv[0];
    for (std::size_t i = 0; i < dv.values.size(); ++i) {
        acc += dv.values[i];
        CHECK(acc == doctest::Approx(logv[i + 1]).epsilon(1e-10));
    }
}

TEST_CASE("winsorize clips the documented integer example") {
    std::vector<double> x;
    for (int i = 1; i <= 100; ++i) x.push_back(i);
    // Independent sort-and-clip oracle under the linear-interpolation
    // quantile convention.
    std::vector<double> sorted = x;
    const double lo = stats::quantile_sorted(sorted, 0.01);
    const double hi = stats::quantile_sorted(sorted, 0.99);
    CHECK(lo == doctest::Approx(1.99));
    CHECK(hi == doctest::Approx(99.01));

    const auto w = data::winsorize(x, 0.01, 0.99);
    CHECK(w.front() == doctest::Approx(1.99));
    CHECK(w.back() == doctest::Approx(99.01));
    for (std::size_t i = 1; i + 1 < w.size(); ++i) CHECK(w[i] == x[i]);
}

TEST_CASE("winsorize leaves constant and in-bounds series unchanged") {
    const std::vector<double> c(20, 3.5);
    CHECK(data::winsorize(c, 0.01, 0.99) == c);

    const std::vector<double> inside{5.0, 5.1, 4.9, 5.05, 4.95, 5.2, 4.8, 5.0, 5.0, 5.1};
    const auto w = data::winsorize(inside, 0.0, 1.0);
    CHECK(w == inside);

    CHECK_THROWS_AS(data::winsorize(std::vector<double>{}, 0.01, 0.99), DataError);
}

TEST_CASE("winsorize is idempotent") {
    // Exact when the quantile positions p*(n-1) are integral.
    rng::Rng gen(rng::derive_seed(11, "test:winsor"));
    std::vector<double> x(101);
    for (double& v : x) v = gen.normal(0.0, 2.0);
    const auto once = data::winsorize(x, 0.01, 0.99);
    const auto twice = data::winsorize(once, 0.01, 0.99);
    CHECK(twice == once);

    // For general n the recomputed bounds can drift within one inter-order
    // gap of the tail; bounded by a quarter of the largest adjacent gap.
    std::vector<double> y(137);
    for (double& v : y) v = gen.normal(0.0, 2.0);
    const auto w1 = data::winsorize(y, 0.01, 0.99);
    const auto w2 = data::winsorize(w1, 0.01, 0.99);
    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    double max_gap = 0.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        max_gap = std::max(max_gap, sorted[i] - sorted[i - 1]);
    }
    for (std::size_t i = 0; i < w1.size(); ++i) {
        CHECK(std::abs(w2[i] - w1[i]) <= 0.25 * max_gap + 1e-12);
    }
}

TEST_CASE("adf rejects stationarity of AR(0.5) and not of random walks") {
    int ar_reject = 0;
    int rw_accept_10 = 0;
    int rw_reject_5 = 0;
    const int n_seeds = 20;
    const int t_len = 1000;
    for (int seed = 0; seed < n_seeds; ++seed) {
        rng::Rng gen(rng::derive_seed(11, "test:adf-ar", static_cast<std::uint64_t>(seed)));
        std::vector<double> ar(t_len);
        ar[0] = gen.normal();
        for (int t = 1; t < t_len; ++t) ar[t] = 0.5 * ar[t - 1] + gen.normal();
        const auto res = data::adf_test(ar, 20);
        if (res.p_value < 0.01) ++ar_reject;

        rng::Rng gen2(rng::derive_seed(11, "test:adf-rw", static_cast<std::uint64_t>(seed)));
        std::vector<double> rw(t_len);
        rw[0] = gen2.normal();
        for (int t = 1; t < t_len; ++t) rw[t] = rw[t - 1] + gen2.normal();
        const auto res2 = data::adf_test(rw, 20);
        if (res2.p_value > 0.10) ++rw_accept_10;
        if (res2.p_value < 0.05) ++rw_reject_5;
    }
    CHECK(ar_reject == n_seeds);                 // power: every seed rejects at 1%
    CHECK(rw_accept_10 >= (n_seeds * 9) / 10);   // unit root rarely rejected
    CHECK(rw_reject_5 <= n_seeds / 10);          // size at 5% stays below 10%
}

TEST_CASE("adf on constant input is a degenerate-input error") {
    const std::vector<double> c(200, 1.0);
    CHECK_THROWS_AS(data::adf_test(c, 5), NumericError);
}
