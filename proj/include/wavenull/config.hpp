#pragma once

#include <iosfwd>
#include <string>

#include "wavenull/problem.hpp"

namespace wavenull {

/// Reads a problem description of the form
///
///   # comment
///   [coefficient]
///   kind = transition          # constant | polynomial | transition
///   left = 1
///   right = 5
///   x_start = 0.45
///   x_end = 0.55
///   [potential]
///   value = 1
///   [data]
///   y0 = gaussian 500 0.2
///   y1 = zero
///   [weights]
///   x0 = -0.05
///   T = 2.2
///   [mesh]
///   Nx = 20
///
/// Missing keys keep their defaults. Errors carry the line number.
ProblemConfig parse_config(std::istream& in, const std::string& source = "<config>");
ProblemConfig load_config(const std::string& path);

/// Inverse of parse_config for the representable subset (constant potential).
void write_config(std::ostream& out, const ProblemConfig& config);

}  // namespace wavenull
