#include "voltide/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "voltide/errors.hpp"
#include "voltide/rng.hpp"

namespace voltide::gbt {

double Tree::predict_row(const FeatureMatrix& x, std::size_t row) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(node)];
        const double v = x.columns[static_cast<std::size_t>(nd.feature)][row];
        node = v <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

double GbtModel::predict_row(const FeatureMatrix& x, std::size_t row) const {
    double p = base_prediction;
    for (const auto& t : trees) p += learning_rate * t.predict_row(x, row);
    return p;
}

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct NodeJob {
    int node_index;
    std::vector<std::size_t> rows;
    int depth;
};

// Gain of a candidate split of `rows` (already sorted by the feature):
// reduction in residual SSE, computed from prefix sums.
void scan_feature(const std::vector<double>& column, const std::vector<double>& resid,
                  const std::vector<std::size_t>& sorted_rows, int feature,
                  int min_samples_leaf, SplitChoice& best) {
    const std::size_t n = sorted_rows.size();
    double total = 0.0;
    for (const std::size_t r : sorted_rows) total += resid[r];
    const double parent_score = total * total / static_cast<double>(n);

    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += resid[sorted_rows[i]];
        const double v = column[sorted_rows[i]];
        const double v_next = column[sorted_rows[i + 1]];
        if (v == v_next) continue;
        const auto n_left = static_cast<double>(i + 1);
        const auto n_right = static_cast<double>(n - i - 1);
        if (i + 1 < static_cast<std::size_t>(min_samples_leaf) ||
            n - i - 1 < static_cast<std::size_t>(min_samples_leaf)) {
            continue;
        }
        const double right_sum = total - left_sum;
        const double gain =
            left_sum * left_sum / n_left + right_sum * right_sum / n_right - parent_score;
        if (gain > best.gain) {
            best.gain = gain;
            best.feature = feature;
            best.threshold = 0.5 * (v + v_next);
        }
    }
}

}  // namespace

GbtModel fit_gbt(const FeatureMatrix& x, std::span<const double> y, const GbtHyperParams& hp) {
    const std::size_t n = x.n_rows();
    const std::size_t k = x.n_features();
    if (n == 0 || k == 0) throw NumericError("fit_gbt: empty data");
    if (y.size() != n) throw NumericError("fit_gbt: target length mismatch");
    if (hp.n_trees < 0 || hp.max_depth < 1 || hp.min_samples_leaf < 1) {
        throw NumericError("fit_gbt: invalid hyperparameters");
    }
    if (!(hp.learning_rate > 0.0 && hp.learning_rate <= 1.0) ||
        !(hp.subsample > 0.0 && hp.subsample <= 1.0)) {
        throw NumericError("fit_gbt: invalid hyperparameters");
    }
    if (n < 2 * static_cast<std::size_t>(hp.min_samples_leaf)) {
        throw NumericError("fit_gbt: fewer rows than 2 * min_samples_leaf");
    }

    // Features presorted once; node-level sorted row lists come from a
    // membership-filtered walk of these global orders.
    std::vector<std::vector<std::size_t>> sorted_by_feature(k);
    for (std::size_t f = 0; f < k; ++f) {
        auto& order = sorted_by_feature[f];
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        const auto& col = x.columns[f];
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    }

    GbtModel model;
    model.learning_rate = hp.learning_rate;
    model.feature_names = x.names;
    model.gain_by_feature.assign(k, 0.0);
    double base = 0.0;
    for (const double v : y) base += v;
    model.base_prediction = base / static_cast<double>(n);

    std::vector<double> prediction(n, model.base_prediction);
    std::vector<double> resid(n);
    std::vector<char> in_node(n);
    const auto n_sub = static_cast<std::size_t>(
        std::max(1.0, std::round(hp.subsample * static_cast<double>(n))));

    for (int m = 0; m < hp.n_trees; ++m) {
        for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - prediction[i];

        std::vector<std::size_t> root_rows;
        if (hp.subsample < 1.0) {
            rng::Rng gen(rng::derive_seed(hp.seed, "gbt:subsample", static_cast<std::uint64_t>(m)));
            root_rows = rng::sample_without_replacement(gen, n, n_sub);
        } else {
            root_rows.resize(n);
            std::iota(root_rows.begin(), root_rows.end(), std::size_t{0});
        }

        Tree tree;
        tree.nodes.push_back({});
        std::vector<NodeJob> stack;
        stack.push_back({0, std::move(root_rows), 0});
        while (!stack.empty()) {
            NodeJob job = std::move(stack.back());
            stack.pop_back();
            auto& node = tree.nodes[static_cast<std::size_t>(job.node_index)];

            double sum = 0.0;
            for (const std::size_t r : job.rows) sum += resid[r];
            node.value = sum / static_cast<double>(job.rows.size());

            if (job.depth >= hp.max_depth ||
                job.rows.size() < 2 * static_cast<std::size_t>(hp.min_samples_leaf)) {
                continue;
            }

            std::fill(in_node.begin(), in_node.end(), char{0});
            for (const std::size_t r : job.rows) in_node[r] = 1;

            SplitChoice best;
            std::vector<std::size_t> node_sorted;
            node_sorted.reserve(job.rows.size());
            for (std::size_t f = 0; f < k; ++f) {
                node_sorted.clear();
                for (const std::size_t r : sorted_by_feature[f]) {
                    if (in_node[r]) node_sorted.push_back(r);
                }
                scan_feature(x.columns[f], resid, node_sorted, static_cast<int>(f),
                             hp.min_samples_leaf, best);
            }
            if (best.feature < 0 || !(best.gain > 1e-12)) continue;

            model.gain_by_feature[static_cast<std::size_t>(best.feature)] += best.gain;

            NodeJob left{static_cast<int>(tree.nodes.size()), {}, job.depth + 1};
            NodeJob right{static_cast<int>(tree.nodes.size()) + 1, {}, job.depth + 1};
            const auto& col = x.columns[static_cast<std::size_t>(best.feature)];
            for (const std::size_t r : job.rows) {
                (col[r] <= best.threshold ? left.rows : right.rows).push_back(r);
            }
            auto& nd = tree.nodes[static_cast<std::size_t>(job.node_index)];
            nd.feature = best.feature;
            nd.threshold = best.threshold;
            nd.left = left.node_index;
            nd.right = right.node_index;
            tree.nodes.push_back({});
            tree.nodes.push_back({});
            stack.push_back(std::move(left));
            stack.push_back(std::move(right));
        }

        for (std::size_t i = 0; i < n; ++i) {
            prediction[i] += hp.learning_rate * tree.predict_row(x, i);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::vector<double> predict(const GbtModel& model, const FeatureMatrix& x) {
    return predict_prefix(model, x, model.trees.size());
}

std::vector<double> predict_prefix(const GbtModel& model, const FeatureMatrix& x,
                                   std::size_t n_trees) {
    if (x.n_features() != model.feature_names.size()) {
        throw NumericError("predict: feature count differs from training");
    }
    n_trees = std::min(n_trees, model.trees.size());
    std::vector<double> out(x.n_rows(), model.base_prediction);
    for (std::size_t t = 0; t < n_trees; ++t) {
        for (std::size_t i = 0; i < x.n_rows(); ++i) {
            out[i] += model.learning_rate * model.trees[t].predict_row(x, i);
        }
    }
    return out;
}

namespace {

FeatureMatrix slice_rows(const FeatureMatrix& x, std::size_t begin, std::size_t end) {
    FeatureMatrix out;
    out.names = x.names;
    out.columns.reserve(x.columns.size());
    for (const auto& col : x.columns) {
        out.columns.emplace_back(col.begin() + static_cast<std::ptrdiff_t>(begin),
                                 col.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

}  // namespace

GbtHyperParams tune(const FeatureMatrix& x, std::span<const double> y,
                    const std::vector<GbtHyperParams>& grid, int n_folds) {
    if (grid.empty()) throw NumericError("tune: empty grid");
    if (n_folds < 1) throw NumericError("tune: need at least one fold");
    const std::size_t n = x.n_rows();
    const std::size_t block = n / (static_cast<std::size_t>(n_folds) + 1);
    if (block < 2) throw NumericError("tune: folds too small");

    // One maximal fit covers every n_trees value of a (depth, lr, leaf,
    // subsample, seed) family: shorter fits are exact prefixes.
    struct Key {
        int max_depth;
        double learning_rate;
        int min_samples_leaf;
        double subsample;
        std::uint64_t seed;
        bool operator==(const Key&) const = default;
    };
    std::vector<double> mean_mse(grid.size(), 0.0);

    for (int fold = 1; fold <= n_folds; ++fold) {
        const std::size_t train_end = static_cast<std::size_t>(fold) * block;
        const std::size_t val_end = train_end + block;
        const FeatureMatrix x_train = slice_rows(x, 0, train_end);
        const FeatureMatrix x_val = slice_rows(x, train_end, val_end);
        const std::span<const double> y_train = y.subspan(0, train_end);
        const std::span<const double> y_val = y.subspan(train_end, block);

        std::vector<Key> seen;
        std::vector<GbtModel> models;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto& hp = grid[g];
            const Key key{hp.max_depth, hp.learning_rate, hp.min_samples_leaf, hp.subsample,
                          hp.seed};
            std::size_t slot = seen.size();
            for (std::size_t s = 0; s < seen.size(); ++s) {
                if (seen[s] == key) {
                    slot = s;
                    break;
                }
            }
            if (slot == seen.size()) {
                int max_trees = 0;
                for (const auto& other : grid) {
                    const Key ok{other.max_depth, other.learning_rate, other.min_samples_leaf,
                                 other.subsample, other.seed};
                    if (ok == key) max_trees = std::max(max_trees, other.n_trees);
                }
                auto hp_max = hp;
                hp_max.n_trees = max_trees;
                seen.push_back(key);
                models.push_back(fit_gbt(x_train, y_train, hp_max));
            }
            const auto pred =
                predict_prefix(models[slot], x_val, static_cast<std::size_t>(hp.n_trees));
            double mse = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double e = y_val[i] - pred[i];
                mse += e * e;
            }
            mean_mse[g] += mse / static_cast<double>(pred.size());
        }
    }

    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const auto better = [&] {
            if (mean_mse[g] != mean_mse[best]) return mean_mse[g] < mean_mse[best];
            if (grid[g].n_trees != grid[best].n_trees) {
                return grid[g].n_trees < grid[best].n_trees;
            }
            return grid[g].max_depth < grid[best].max_depth;
        }();
        if (better) best = g;
    }
    return grid[best];
}

}  // namespace voltide::gbt
