#pragma once

#include <string>
#include <vector>

#include "polystab/basis.h"
#include "polystab/experiment.h"

namespace polystab {

/// vanderpol, linear1d (ẋ = x + u), scalar-cubic (ẋ = x³ + u),
/// integrator (ẋ = u). Throws ConfigError for other names.
GroundTruth builtin_system(const std::string& name);
std::vector<std::string> builtin_system_names();

/// Z = degrees 1..3 for vanderpol and scalar-cubic, Z = x otherwise; Ẑ = x.
BasisSpec default_basis(const std::string& name);

}  // namespace polystab
