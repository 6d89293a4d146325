#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace voltide::gbt {

/// Column-major feature matrix with named features.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;  ///< columns[feature][row]

    [[nodiscard]] std::size_t n_rows() const {
        return columns.empty() ? 0 : columns.front().size();
    }
    [[nodiscard]] std::size_t n_features() const { return columns.size(); }
};

struct GbtHyperParams {
    int n_trees = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
    int min_samples_leaf = 5;
    double subsample = 1.0;
    std::uint64_t seed = 0;
};

/// Axis-aligned regression tree stored as a flat node array.
struct TreeNode {
    int feature = -1;  ///< -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;

    [[nodiscard]] double predict_row(const FeatureMatrix& x, std::size_t row) const;
};

struct GbtModel {
    std::vector<Tree> trees;
    double base_prediction = 0.0;
    double learning_rate = 0.1;
    std::vector<std::string> feature_names;
    std::vector<double> gain_by_feature;  ///< accumulated squared-error reduction

    [[nodiscard]] double predict_row(const FeatureMatrix& x, std::size_t row) const;
};

/// Squared-error gradient boosting: each tree fits the current residuals with
/// exact greedy splits (midpoints between consecutive distinct sorted values,
/// variance-reduction gain, both children >= min_samples_leaf). Row
/// subsampling draws a fresh seeded sample per tree, so a fit with fewer
/// trees is exactly a prefix of a longer fit. Deterministic given hp.seed.
GbtModel fit_gbt(const FeatureMatrix& x, std::span<const double> y, const GbtHyperParams& hp);

std::vector<double> predict(const GbtModel& model, const FeatureMatrix& x);

/// Predictions using only the first `n_trees` trees.
std::vector<double> predict_prefix(const GbtModel& model, const FeatureMatrix& x,
                                   std::size_t n_trees);

/// Grid search with forward-chaining time-series folds: fold i trains on the
/// first i blocks and validates on block i+1. Returns the grid point with the
/// lowest mean validation MSE; ties break toward fewer trees, then shallower
/// depth, then grid order.
GbtHyperParams tune(const FeatureMatrix& x, std::span<const double> y,
                    const std::vector<GbtHyperParams>& grid, int n_folds);

}  // namespace voltide::gbt
