#pragma once

#include <string>
#include <string_view>

#include "pllranges/model.hpp"

namespace pllranges {

// Parses the JSON loop description:
//   {"pd": {"kind": ..., "period": 6.28... | "2pi" | "pi", "table": {...}},
//    "filter": {"num": [...], "den": [...], "realization": {"A", "b", "c", "h"}},
//    "loop": {"L": ..., "omega_delta_free": ...},
//    "description": "..."}
// Unknown keys are rejected. Failures throw ConfigError carrying the key path.
LoopSpec parse_config(std::string_view text);

LoopSpec load_config(const std::string& path);

}  // namespace pllranges
