#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "voltide/errors.hpp"
#include "voltide/gbt.hpp"
#include "voltide/rng.hpp"

using namespace voltide;

namespace {

gbt::FeatureMatrix matrix_of(std::vector<std::vector<double>> columns) {
    gbt::FeatureMatrix x;
    for (std::size_t f = 0; f < columns.size(); ++f) x.names.push_back("f" + std::to_string(f));
    x.columns = std::move(columns);
    return x;
}

struct StepData {
    gbt::FeatureMatrix x;
    std::vector<double> y;
};

// y = 1{x0 > 0} + noise_sd * eps, with extra pure-noise features.
StepData step_data(std::size_t n, std::size_t noise_features, double noise_sd,
                   std::uint64_t seed) {
    rng::Rng gen(seed);
    StepData d;
    std::vector<std::vector<double>> cols(1 + noise_features, std::vector<double>(n));
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cols[0][i] = gen.normal();
        for (std::size_t f = 1; f < cols.size(); ++f) cols[f][i] = gen.normal();
        d.y[i] = (cols[0][i] > 0.0 ? 1.0 : 0.0) + noise_sd * gen.normal();
    }
    d.x = matrix_of(std::move(cols));
    return d;
}

double mse(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("constant target yields the constant prediction with zero gains") {
    rng::Rng gen(rng::derive_seed(17, "test:gbt-const"));
    std::vector<std::vector<double>> cols(3, std::vector<double>(200));
    for (auto& c : cols) {
        for (double& v : c) v = gen.normal();
    }
    const auto x = matrix_of(std::move(cols));
    const std::vector<double> y(200, 2.5);
    gbt::GbtHyperParams hp;
    hp.n_trees = 20;
    const auto model = gbt::fit_gbt(x, y, hp);
    for (const double p : gbt::predict(model, x)) CHECK(p == doctest::Approx(2.5));
    for (const double g : model.gain_by_feature) CHECK(g == 0.0);
}

TEST_CASE("a step function is learned to near-zero error") {
    const auto train = step_data(2000, 0, 0.01, rng::derive_seed(17, "test:gbt-step"));
    gbt::GbtHyperParams hp;
    hp.n_trees = 100;
    hp.max_depth = 2;
    hp.learning_rate = 0.1;
    const auto model = gbt::fit_gbt(train.x, train.y, hp);
    CHECK(mse(gbt::predict(model, train.x), train.y) < 0.01);

    const auto holdout = step_data(500, 0, 0.01, rng::derive_seed(17, "test:gbt-step-holdout"));
    CHECK(mse(gbt::predict(model, holdout.x), holdout.y) < 0.01);
}

TEST_CASE("the informative feature dominates total gain") {
    const auto d = step_data(1500, 5, 0.05, rng::derive_seed(17, "test:gbt-gain"));
    gbt::GbtHyperParams hp;
    hp.n_trees = 60;
    hp.max_depth = 3;
    const auto model = gbt::fit_gbt(d.x, d.y, hp);
    for (std::size_t f = 1; f < model.gain_by_feature.size(); ++f) {
        CHECK(model.gain_by_feature[0] > 10.0 * model.gain_by_feature[f]);
    }
}

TEST_CASE("zero trees predict the base everywhere") {
    const auto d = step_data(100, 0, 0.1, 1);
    gbt::GbtHyperParams hp;
    hp.n_trees = 0;
    const auto model = gbt::fit_gbt(d.x, d.y, hp);
    double base = 0.0;
    for (const double v : d.y) base += v;
    base /= static_cast<double>(d.y.size());
    for (const double p : gbt::predict(model, d.x)) CHECK(p == doctest::Approx(base));
}

TEST_CASE("a hand-built single-split tree routes rows to its leaves") {
    gbt::GbtModel model;
    model.base_prediction = 1.0;
    model.learning_rate = 0.5;
    model.feature_names = {"f0"};
    gbt::Tree tree;
    tree.nodes.resize(3);
    tree.nodes[0] = {0, 0.0, 0.0, 1, 2};
    tree.nodes[1] = {-1, 0.0, -2.0, -1, -1};
    tree.nodes[2] = {-1, 0.0, 4.0, -1, -1};
    model.trees.push_back(tree);

    const auto x = matrix_of({{-1.0, 0.0, 1.0}});
    const auto p = gbt::predict(model, x);
    CHECK(p[0] == doctest::Approx(1.0 + 0.5 * -2.0));
    CHECK(p[1] == doctest::Approx(1.0 + 0.5 * -2.0));  // boundary routes left
    CHECK(p[2] == doctest::Approx(1.0 + 0.5 * 4.0));
}

TEST_CASE("prediction on training rows reproduces fit-time predictions exactly") {
    const auto d = step_data(400, 2, 0.2, rng::derive_seed(17, "test:gbt-repro"));
    gbt::GbtHyperParams hp;
    hp.n_trees = 40;
    hp.subsample = 0.8;
    hp.seed = 9;
    const auto m1 = gbt::fit_gbt(d.x, d.y, hp);
    const auto m2 = gbt::fit_gbt(d.x, d.y, hp);
    const auto p1 = gbt::predict(m1, d.x);
    const auto p2 = gbt::predict(m2, d.x);
    CHECK(p1 == p2);
}

TEST_CASE("a shorter fit is an exact prefix of a longer fit") {
    const auto d = step_data(600, 3, 0.2, rng::derive_seed(17, "test:gbt-prefix"));
    gbt::GbtHyperParams hp;
    hp.n_trees = 30;
    hp.subsample = 0.7;
    hp.seed = 4;
    auto hp_long = hp;
    hp_long.n_trees = 80;
    const auto short_fit = gbt::fit_gbt(d.x, d.y, hp);
    const auto long_fit = gbt::fit_gbt(d.x, d.y, hp_long);
    const auto a = gbt::predict(short_fit, d.x);
    const auto b = gbt::predict_prefix(long_fit, d.x, 30);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("training MSE is non-increasing over boosting rounds at full subsample") {
    const auto d = step_data(500, 2, 0.3, rng::derive_seed(17, "test:gbt-monotone"));
    gbt::GbtHyperParams hp;
    hp.n_trees = 50;
    hp.subsample = 1.0;
    const auto model = gbt::fit_gbt(d.x, d.y, hp);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= model.trees.size(); k += 5) {
        const double m = mse(gbt::predict_prefix(model, d.x, k), d.y);
        CHECK(m <= prev + 1e-12);
        prev = m;
    }
}

TEST_CASE("one extra tree moves predictions by at most lr times the largest leaf") {
    const auto d = step_data(300, 1, 0.3, rng::derive_seed(17, "test:gbt-steplimit"));
    gbt::GbtHyperParams hp;
    hp.n_trees = 25;
    const auto model = gbt::fit_gbt(d.x, d.y, hp);
    for (std::size_t k = 1; k <= model.trees.size(); ++k) {
        double max_leaf = 0.0;
        for (const auto& nd : model.trees[k - 1].nodes) {
            if (nd.feature < 0) max_leaf = std::max(max_leaf, std::abs(nd.value));
        }
        const auto a = gbt::predict_prefix(model, d.x, k - 1);
        const auto b = gbt::predict_prefix(model, d.x, k);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(std::abs(b[i] - a[i]) <= hp.learning_rate * max_leaf + 1e-12);
        }
    }
}

TEST_CASE("permuting the top feature hurts more than permuting a zero-gain feature") {
    auto d = step_data(1200, 4, 0.05, rng::derive_seed(17, "test:gbt-perm"));
    // A constant column can never split, so its gain is exactly zero.
    d.x.names.push_back("const");
    d.x.columns.emplace_back(d.x.n_rows(), 1.0);
    gbt::GbtHyperParams hp;
    hp.n_trees = 60;
    hp.max_depth = 3;
    const auto model = gbt::fit_gbt(d.x, d.y, hp);
    const double base_mse = mse(gbt::predict(model, d.x), d.y);

    const auto top = static_cast<std::size_t>(
        std::max_element(model.gain_by_feature.begin(), model.gain_by_feature.end()) -
        model.gain_by_feature.begin());
    std::size_t zero = model.gain_by_feature.size();
    for (std::size_t f = 0; f < model.gain_by_feature.size(); ++f) {
        if (model.gain_by_feature[f] == 0.0) zero = f;
    }
    REQUIRE(top == 0);
    REQUIRE(zero < model.gain_by_feature.size());

    const auto permute_col_mse = [&](std::size_t f) {
        auto x2 = d.x;
        rng::Rng gen(rng::derive_seed(17, "test:gbt-perm-shuffle"));
        auto& col = x2.columns[f];
        for (std::size_t i = col.size(); i > 1; --i) {
            std::swap(col[i - 1], col[gen.uniform_int(i)]);
        }
        return mse(gbt::predict(model, x2), d.y);
    };
    CHECK(permute_col_mse(top) > permute_col_mse(zero));
    CHECK(permute_col_mse(zero) == doctest::Approx(base_mse));
}

TEST_CASE("tune returns the only grid entry and breaks ties deterministically") {
    const auto d = step_data(300, 1, 0.2, rng::derive_seed(17, "test:gbt-tune1"));
    gbt::GbtHyperParams only;
    only.n_trees = 15;
    CHECK(gbt::tune(d.x, d.y, {only}, 3).n_trees == 15);

    auto twin = only;
    const auto picked = gbt::tune(d.x, d.y, {only, twin}, 3);
    CHECK(picked.n_trees == only.n_trees);
    CHECK(picked.max_depth == only.max_depth);
}

TEST_CASE("tune picks the grid point with the lowest held-out MSE") {
    const auto d = step_data(900, 2, 0.15, rng::derive_seed(17, "test:gbt-tune2"));
    std::vector<gbt::GbtHyperParams> grid;
    for (const int depth : {1, 2, 3}) {
        for (const int trees : {10, 60}) {
            gbt::GbtHyperParams hp;
            hp.max_depth = depth;
            hp.n_trees = trees;
            hp.min_samples_leaf = 2;
            grid.push_back(hp);
        }
    }
    const int n_folds = 4;
    const auto picked = gbt::tune(d.x, d.y, grid, n_folds);

    // Independent re-run oracle: evaluate every grid point with fresh fits.
    const std::size_t block = d.x.n_rows() / (n_folds + 1);
    std::vector<double> oracle_mse(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (int fold = 1; fold <= n_folds; ++fold) {
            const std::size_t train_end = static_cast<std::size_t>(fold) * block;
            gbt::FeatureMatrix xt, xv;
            xt.names = xv.names = d.x.names;
            for (const auto& col : d.x.columns) {
                xt.columns.emplace_back(col.begin(), col.begin() + train_end);
                xv.columns.emplace_back(col.begin() + train_end,
                                        col.begin() + train_end + block);
            }
            const std::vector<double> yt(d.y.begin(), d.y.begin() + train_end);
            const std::vector<double> yv(d.y.begin() + train_end,
                                         d.y.begin() + train_end + block);
            const auto model = gbt::fit_gbt(xt, yt, grid[g]);
            oracle_mse[g] += mse(gbt::predict(model, xv), yv) / n_folds;
        }
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(oracle_mse.begin(), oracle_mse.end()) - oracle_mse.begin());
    CHECK(picked.max_depth == grid[best].max_depth);
    CHECK(picked.n_trees == grid[best].n_trees);
}

TEST_CASE("degenerate inputs are rejected") {
    gbt::FeatureMatrix empty;
    CHECK_THROWS_AS(gbt::fit_gbt(empty, std::vector<double>{}, {}), NumericError);

    const auto d = step_data(30, 1, 0.1, 3);
    gbt::GbtHyperParams hp;
    hp.min_samples_leaf = 20;
    CHECK_THROWS_AS(gbt::fit_gbt(d.x, d.y, hp), NumericError);
    CHECK_THROWS_AS(gbt::tune(d.x, d.y, {gbt::GbtHyperParams{}}, 20), NumericError);

    const auto model = gbt::fit_gbt(d.x, d.y, gbt::GbtHyperParams{});
    gbt::FeatureMatrix wrong = matrix_of({{1.0}, {2.0}, {3.0}});
    CHECK_THROWS_AS(gbt::predict(model, wrong), NumericError);
}
