#pragma once

#include "json.hpp"
#include "voltide/egarch.hpp"
#include "voltide/factors.hpp"

namespace voltide::serialize {

/// Volatility-model dump carrying parameters and the final filter state,
/// sufficient to resume filtering deterministically.
nlohmann::json egarch_to_json(const garch::EgarchModel& model);
garch::EgarchModel egarch_from_json(const nlohmann::json& j);

nlohmann::json pca_to_json(const factors::PcaModel& model);

/// JSON-safe double: non-finite values encode as strings ("inf", "-inf",
/// "nan") so dumps stay loadable.
nlohmann::json json_double(double v);

}  // namespace voltide::serialize
