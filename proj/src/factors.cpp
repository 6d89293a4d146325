#include "voltide/factors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "voltide/errors.hpp"
#include "voltide/rng.hpp"
#include "voltide/stats.hpp"

namespace voltide::factors {

Panel make_panel(const std::string& category, const std::vector<data::TransformedSeries>& parts) {
    if (parts.empty()) throw DataError("panel '" + category + "' has no series");
    Panel panel;
    panel.category = category;
    panel.dates = parts.front().dates;
    for (const auto& ts : parts) {
        if (ts.dates != panel.dates) {
            throw DataError("panel '" + category + "': misaligned dates for " + ts.asset_id);
        }
        panel.asset_ids.push_back(ts.asset_id);
        panel.series.push_back(ts.values);
    }
    return panel;
}

namespace {

struct EigenDecomposition {
    std::vector<double> eigenvalues;               // descending
    std::vector<std::vector<double>> eigenvectors;  // [component][variable]
};

EigenDecomposition correlation_eigen(const std::vector<std::vector<double>>& z, std::size_t t_len) {
    const std::size_t k = z.size();
    Eigen::MatrixXd corr(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < t_len; ++t) s += z[i][t] * z[j][t];
            s /= static_cast<double>(t_len - 1);
            corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
            corr(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
    if (solver.info() != Eigen::Success) throw NumericError("eigen decomposition failed");

    EigenDecomposition out;
    out.eigenvalues.resize(k);
    out.eigenvectors.assign(k, std::vector<double>(k));
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = static_cast<Eigen::Index>(k - 1 - c);  // ascending -> descending
        out.eigenvalues[c] = solver.eigenvalues()(src);
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            out.eigenvectors[c][i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), src);
            sum += out.eigenvectors[c][i];
        }
        if (sum < 0.0 || (sum == 0.0 && out.eigenvectors[c][0] < 0.0)) {
            for (double& v : out.eigenvectors[c]) v = -v;
        }
    }
    return out;
}

}  // namespace

PcaModel fit_pca(const Panel& panel) {
    const std::size_t k = panel.series.size();
    if (k < 2) throw DataError("panel '" + panel.category + "': need at least 2 series");
    const std::size_t t_len = panel.dates.size();
    if (t_len < 3) throw DataError("panel '" + panel.category + "': too few observations");
    for (const auto& s : panel.series) {
        if (s.size() != t_len) {
            throw DataError("panel '" + panel.category + "': misaligned series lengths");
        }
    }

    PcaModel model;
    model.category = panel.category;
    model.asset_ids = panel.asset_ids;
    model.dates = panel.dates;
    model.means.resize(k);
    model.stds.resize(k);

    std::vector<std::vector<double>> z(k, std::vector<double>(t_len));
    for (std::size_t i = 0; i < k; ++i) {
        model.means[i] = stats::mean(panel.series[i]);
        model.stds[i] = stats::stddev(panel.series[i]);
        if (!(model.stds[i] > 0.0)) {
            throw DataError("panel '" + panel.category + "': constant series " +
                            panel.asset_ids[i]);
        }
        for (std::size_t t = 0; t < t_len; ++t) {
            z[i][t] = (panel.series[i][t] - model.means[i]) / model.stds[i];
        }
    }

    auto eig = correlation_eigen(z, t_len);
    model.eigenvalues = std::move(eig.eigenvalues);
    model.loadings = std::move(eig.eigenvectors);

    model.scores.resize(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += model.loadings[0][i] * z[i][t];
        model.scores[t] = s;
    }
    return model;
}

double project_pc1(const PcaModel& model, std::span<const double> row) {
    if (row.size() != model.asset_ids.size()) {
        throw DataError("projection row width does not match model");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        s += model.loadings[0][i] * (row[i] - model.means[i]) / model.stds[i];
    }
    return s;
}

void align_sign(PcaModel& model, std::span<const double> reference_pc1) {
    if (reference_pc1.size() != model.pc1().size()) return;
    double dot = 0.0;
    for (std::size_t i = 0; i < reference_pc1.size(); ++i) {
        dot += reference_pc1[i] * model.loadings[0][i];
    }
    if (dot < 0.0) {
        for (double& v : model.loadings[0]) v = -v;
        for (double& v : model.scores) v = -v;
    }
}

HornResult horns_parallel_analysis(const Panel& panel, int n_random, double percentile,
                                   std::uint64_t seed) {
    if (n_random < 100) throw DataError("parallel analysis needs n_random >= 100");
    const PcaModel observed = fit_pca(panel);
    const std::size_t k = panel.series.size();
    const std::size_t t_len = panel.dates.size();

    std::vector<std::vector<double>> ranked(k, std::vector<double>(static_cast<std::size_t>(n_random)));
    std::vector<std::vector<double>> z(k, std::vector<double>(t_len));
    for (int r = 0; r < n_random; ++r) {
        rng::Rng gen(rng::derive_seed(seed, "horn:replicate", static_cast<std::uint64_t>(r)));
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t t = 0; t < t_len; ++t) z[i][t] = gen.normal();
            const double m = stats::mean(z[i]);
            const double sd = stats::stddev(z[i]);
            for (std::size_t t = 0; t < t_len; ++t) z[i][t] = (z[i][t] - m) / sd;
        }
        const auto eig = correlation_eigen(z, t_len);
        for (std::size_t c = 0; c < k; ++c) {
            ranked[c][static_cast<std::size_t>(r)] = eig.eigenvalues[c];
        }
    }

    HornResult out;
    out.eigenvalues_observed = observed.eigenvalues;
    out.eigenvalues_critical.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        std::sort(ranked[c].begin(), ranked[c].end());
        out.eigenvalues_critical[c] = stats::quantile_sorted(ranked[c], percentile);
    }
    // Components are retained from the top while they beat their critical
    // value; ordering is meaningless past the first failure.
    for (std::size_t c = 0; c < k; ++c) {
        if (!(out.eigenvalues_observed[c] > out.eigenvalues_critical[c])) break;
        out.retained.push_back(c);
    }
    return out;
}

}  // namespace voltide::factors
