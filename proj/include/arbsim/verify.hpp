#pragma once

#include <iosfwd>

namespace arbsim {

// Module-level oracle suites runnable from the command line: GAE recursion vs
// its explicit summation, clearance screening vs exhaustive pairwise
// distances, impairment statistics vs configured rates, the pure-pursuit
// curvature identity, and fusion endpoints. Prints one pass/fail line per
// suite; returns true when everything passed.
bool run_verify_suites(std::ostream& os);

}  // namespace arbsim
