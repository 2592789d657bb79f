#pragma once

#include <iosfwd>

namespace mwucb {

/// Fast property checks over the library: solver optimality, window
/// recursion, weight bounds, coupling and Lipschitz bounds, determinism and
/// sampler normalization. Prints one line per check; true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace mwucb
