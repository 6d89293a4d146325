#include "voltide/serialize.hpp"

#include <cmath>
#include <limits>

namespace voltide::serialize {

nlohmann::json json_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

nlohmann::json egarch_to_json(const garch::EgarchModel& model) {
    const auto& p = model.params;
    return nlohmann::json{
        {"mu", p.mu},
        {"phi", p.phi},
        {"omega", p.omega},
        {"alpha", p.alpha},
        {"beta", p.beta},
        {"gamma", p.gamma},
        {"nu", p.dist.nu},
        {"xi", p.dist.xi},
        {"mu_dist", p.dist.mu_dist},
        {"sigma_dist", p.dist.sigma_dist},
        {"e_abs_z", p.e_abs_z},
        {"log_likelihood", model.log_likelihood},
        {"converged", model.converged},
        {"state",
         {{"sigma", model.state.sigma},
          {"last_value", model.state.last_value},
          {"last_residual",
           model.state.residuals.empty() ? 0.0 : model.state.residuals.back()}}},
    };
}

garch::EgarchModel egarch_from_json(const nlohmann::json& j) {
    garch::EgarchModel model;
    auto& p = model.params;
    p.mu = j.at("mu").get<double>();
    p.phi = j.at("phi").get<double>();
    p.omega = j.at("omega").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.dist.nu = j.at("nu").get<double>();
    p.dist.xi = j.at("xi").get<double>();
    p.dist.mu_dist = j.at("mu_dist").get<double>();
    p.dist.sigma_dist = j.at("sigma_dist").get<double>();
    p.e_abs_z = j.at("e_abs_z").get<double>();
    model.log_likelihood = j.at("log_likelihood").get<double>();
    model.converged = j.at("converged").get<bool>();
    const auto& s = j.at("state");
    model.state.sigma = s.at("sigma").get<double>();
    model.state.last_value = s.at("last_value").get<double>();
    model.state.residuals = {s.at("last_residual").get<double>()};
    model.state.cond_vols = {model.state.sigma};
    return model;
}

nlohmann::json pca_to_json(const factors::PcaModel& model) {
    nlohmann::json loadings = nlohmann::json::array();
    for (const auto& comp : model.loadings) loadings.push_back(comp);
    return nlohmann::json{
        {"category", model.category}, {"asset_ids", model.asset_ids},
        {"means", model.means},       {"stds", model.stds},
        {"loadings", loadings},       {"eigenvalues", model.eigenvalues},
    };
}

}  // namespace voltide::serialize
