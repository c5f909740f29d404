#pragma once

#include "shrinkerlab/mesh.hpp"

#include <string>

namespace shrinkerlab {

/// SHRNK mesh file format (ASCII):
///   line 1: `SHRNK n N V S B`
///   V lines of N floats (vertices, 17 significant digits)
///   S lines of n+1 0-based vertex indices
///   B lines of one boundary facet id each (facet id = simplex*(n+1)+local)
void write_shrnk(const DiscreteHypersurface& mesh, const std::string& path);

/// Parse a SHRNK file; throws Error with codes malformed-header,
/// index-out-of-range, degenerate-simplex (messages carry line numbers).
DiscreteHypersurface read_shrnk(const std::string& path);

std::string format_double(double v); // 17 significant digits

} // namespace shrinkerlab
