#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "explorebench/types.hpp"

namespace explorebench {

using Json = nlohmann::ordered_json;

Json to_json(const ObjectRef& ref);
ObjectRef object_ref_from_json(const Json& j);
/// Parses "color kind".
ObjectRef parse_object_ref(const std::string& text);

/// Canonical world.json document. Key order is fixed, so equal worlds
/// serialize to identical bytes.
Json to_json(const WorldSpec& world);
WorldSpec world_from_json(const Json& j);

std::string serialize_world(const WorldSpec& world);
void save_world(const WorldSpec& world, const std::filesystem::path& path);
WorldSpec load_world(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string world_hash(const WorldSpec& world);

}  // namespace explorebench
