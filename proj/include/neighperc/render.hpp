#pragma once

#include <string>

#include "neighperc/explore.hpp"

namespace neighperc {

// Deterministic SVG rendering: integer pixel arithmetic only, fixed element
// order, so identical inputs give byte-identical documents. Windows larger
// than radius 128 are rejected (std::domain_error).

std::string render_config_svg(const Configuration& config);
std::string render_exploration_svg(const Configuration& config, const ExplorationRecord& record);

}  // namespace neighperc
