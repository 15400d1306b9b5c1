#pragma once

// JSON encodings shared by traces, the service and the command line.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cakecut/core.hpp"
#include "cakecut/procedures.hpp"

namespace cakecut::io {

using Json = nlohmann::json;

/// {"cake_pixels": 600, "agents": [{"weights": [[start, end, weight], ...]}, ...]}
Json to_json(const Profile& profile);
Profile profile_from_json(const Json& j);

/// A fixture name ("2acc", ..., or "envy" for the three-agent manipulation
/// instance) or a path to a profile JSON file.
Profile load_profile(const std::string& name_or_path);

Json to_json(const Interval& iv);
Json to_json(const Piece& piece);
Json to_json(const Query& query);

/// Compact action value: cut -> x, cut2 -> [a, b], choose -> i,
/// diminish -> x or null, trim -> [piece, x].
Json action_value(QueryKind kind, const Action& action);
Action action_from_value(QueryKind kind, const Json& value);

/// Reads an action posted by a client, e.g. {"cut": 120}, {"cuts": [a, b]},
/// {"choice": 1}, {"pass": true}, {"piece": 0, "cut": 310}.
Action action_from_request(const Json& body);

std::string read_file(const std::filesystem::path& path);

}  // namespace cakecut::io
