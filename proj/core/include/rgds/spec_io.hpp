#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "rgds/system_model.hpp"

namespace rgds {

/// {dimension, vertices, seed_box{lo,hi}, graphs[{prob, edges[{from, to,
/// ratio, translation[, angle, reflect]}]}]}. Vertex ids may be strings or
/// integers; scalars are accepted for one-dimensional coordinates.
SystemSpec parse_spec(const nlohmann::json& j);
SystemSpec load_spec(const std::string& path);
nlohmann::json spec_to_json(const SystemSpec& spec);

}  // namespace rgds
