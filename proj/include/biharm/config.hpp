#pragma once

#include "biharm/study.hpp"

#include <istream>
#include <string>
#include <vector>

namespace biharm {

/// Parses flat `key = value` text. Blank lines and `#` comments are ignored;
/// values may be wrapped in double quotes. Every problem is reported as a
/// ConfigError naming the key.
///
/// Recognised keys: surface, level_set, mesh, initial_level, solution,
/// recovery, gamma, gamma_stab, penalty_scaling, levels, quadrature_degree,
/// output, format.
StudyConfig parse_config(std::istream& in);
StudyConfig load_config(const std::string& path);

/// "a..b", "a, b, c" or a single integer. With `doubling` a range
/// a..b means a, 2a, 4a, ... up to b (torus grid sizes).
std::vector<int> parse_levels(const std::string& text, bool doubling);

/// Throws ConfigError for out-of-range values.
void validate(const StudyConfig& config);

} // namespace biharm
