#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "potluck/engine.hpp"

namespace potluck::cli {

/// A scenario read from its JSON file, together with the canonical form used
/// for hashing. The canonical form holds every semantically relevant field
/// after resolution: expressions re-rendered from their syntax trees, x0 and
/// record_stride with defaults applied, sequence strategies by content.
struct LoadedScenario {
  Scenario scenario;
  nlohmann::json canonical;
  std::string hash;  // 16 hex digits, FNV-1a 64 over canonical.dump()
};

// Throws Error("json_parse") on malformed JSON, ValidationError on schema
// violations and ParseError on bad reward expressions.
LoadedScenario load_scenario(const std::filesystem::path& path);
LoadedScenario load_scenario_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

// Recomputes canonical form and hash after the scenario was modified.
void refresh_canonical(LoadedScenario& ls);

std::string fnv1a_hex(std::string_view bytes);

nlohmann::json to_json(const WeightReport& r);

}  // namespace potluck::cli
