#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arbsim {

// Reproducibility sidecar written into every run directory: the exact command
// line, hashes of the configs it read, the seeds, and start/end timestamps.
struct RunManifest {
  std::string command_line;
  std::string tool_version;
  std::string host;
  std::vector<std::pair<std::string, std::string>> config_hashes;  // path, fnv1a hex
  std::vector<uint64_t> seeds;
  std::string started_at;
  std::string finished_at;
  std::string status = "running";

  void add_config(const std::string& path);
  void write(const std::string& path) const;
  void finalize(const std::string& path, const std::string& final_status);
};

RunManifest start_manifest(int argc, char** argv);
uint64_t fnv1a_file(const std::string& path);

}  // namespace arbsim
