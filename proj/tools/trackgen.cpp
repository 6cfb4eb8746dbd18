// Regenerates the shipped synthetic track assets (occupancy grid + raceline)
// under a target directory. The committed files in data/tracks are the output
// of this tool.

#include <cstdio>
#include <filesystem>
#include <string>

#include "arbsim/synthetic_tracks.hpp"

int main(int argc, char** argv) {
  std::string out_dir = "data/tracks";
  if (argc > 1) out_dir = argv[1];
  std::filesystem::create_directories(out_dir);
  for (const char* name : {"oval", "chicane"}) {
    const arbsim::SyntheticTrack st = arbsim::make_track_by_name(name);
    const std::string track_path = out_dir + "/" + st.name + ".track";
    const std::string line_path = out_dir + "/" + st.name + ".raceline.csv";
    st.track.save(track_path);
    st.raceline.save_csv(line_path);
    std::printf("%s: %dx%d cells, raceline %zu waypoints, length %.2f m\n", st.name.c_str(),
                st.track.width, st.track.height, st.raceline.wp.size(),
                st.raceline.total_length());
  }
  return 0;
}
