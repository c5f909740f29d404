#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shrinkerlab {

/// Runs one CLI command (catalog, residual, area, growth, cutoff, certify,
/// rn-sweep, frankel).  Reports go to `out` as JSON (CSV artifacts embed the
/// config as a `#` comment line).  Exit codes: 0 all checks pass, 1 a check
/// failed its tolerance, 2 configuration or precondition errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out);

} // namespace shrinkerlab
