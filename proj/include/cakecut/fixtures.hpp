#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cakecut/core.hpp"

namespace cakecut::fixtures {

/// Names of the embedded lab profiles, in session order:
/// 2acc, 2scc, 3ds, 4ds, 3ld, 4ld, 4ep, 3sc.
const std::vector<std::string>& lab_profile_names();

/// Lab profile by (case-insensitive) name. Agent 0 is the subject, the rest
/// are the automata in table order. Throws Error for unknown names.
Profile lab_profile(std::string_view name);

/// Six 100-pixel parts with integer densities; agent 0 gains by a
/// manipulation that leaves it envious under Selfridge-Conway.
Profile envy_manipulation_profile();

/// Instance on which truthful reporting earns about 1/n while a single
/// misreport earns the whole cake. Keyed by procedure id (e.g. "3ds").
Profile tightness_profile(std::string_view procedure_id);

/// v_i desires exactly block i of n equal blocks.
Profile block_profile(int agents, Pixel width = kLabWidth);

}  // namespace cakecut::fixtures
