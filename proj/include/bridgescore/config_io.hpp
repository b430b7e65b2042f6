#pragma once
// JSON (de)serialization of run configurations, used by diagnostics and
// run manifests.

#include <json.hpp>

#include "bridgescore/core_model.hpp"
#include "bridgescore/synth.hpp"

namespace bridgescore {

void to_json(nlohmann::json& j, const ScoringConfig& c);
// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, ScoringConfig& c);

void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);

}  // namespace bridgescore
