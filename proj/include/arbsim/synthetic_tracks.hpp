#pragma once

#include <string>

#include "arbsim/raceline.hpp"
#include "arbsim/track.hpp"

namespace arbsim {

struct SyntheticTrack {
  std::string name;
  Track track;
  Raceline raceline;
};

// Closed synthetic circuits shipped with the project (no external map assets).
// Both are corridor tracks: everything outside the swept centerline corridor
// is occupied, so the drivable region is bounded by construction.

// Stadium oval: two 18 m straights joined by 4.5 m-radius turns, 3.2 m-wide
// corridor. Used as the evaluation circuit.
SyntheticTrack make_oval_track(double resolution = 0.05);

// Loop with an S-chicane on the bottom straight, 3.0 m corridor. Used as the
// training circuit.
SyntheticTrack make_chicane_track(double resolution = 0.05);

SyntheticTrack make_track_by_name(const std::string& name, double resolution = 0.05);

}  // namespace arbsim
