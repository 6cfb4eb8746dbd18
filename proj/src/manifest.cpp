#include "arbsim/manifest.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "arbsim/errors.hpp"

namespace arbsim {

namespace {
std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}
}  // namespace

uint64_t fnv1a_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot hash missing file: " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (f.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void RunManifest::add_config(const std::string& path) {
  std::ostringstream hex;
  hex << std::hex << fnv1a_file(path);
  config_hashes.emplace_back(path, hex.str());
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["command_line"] = command_line;
  j["tool_version"] = tool_version;
  j["host"] = host;
  nlohmann::json cfgs = nlohmann::json::array();
  for (const auto& [p, h] : config_hashes) cfgs.push_back({{"path", p}, {"fnv1a", h}});
  j["configs"] = cfgs;
  j["seeds"] = seeds;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["status"] = status;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write manifest: " + path);
  f << j.dump(2) << "\n";
}

void RunManifest::finalize(const std::string& path, const std::string& final_status) {
  finished_at = now_iso8601();
  status = final_status;
  write(path);
}

RunManifest start_manifest(int argc, char** argv) {
  RunManifest m;
  std::ostringstream cmd;
  for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
  m.command_line = cmd.str();
  m.tool_version = "arbsim 0.1.0";
  char host[256] = "unknown";
#if defined(__unix__)
  std::ifstream hn("/proc/sys/kernel/hostname");
  if (hn) hn.getline(host, sizeof(host));
#endif
  m.host = host;
  m.started_at = now_iso8601();
  return m;
}

}  // namespace arbsim
