#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace clicklab {

// Every CLI run that writes files also writes <output>.manifest.json with
// the full parameter map and input/output digests, so a result can be traced
// back to its exact inputs. Digests are 64-bit FNV-1a over the file bytes,
// reproducible across platforms.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> parameters;
  std::vector<std::string> input_paths;
  std::vector<std::string> output_paths;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  // Digests are computed at write time.
  void write(const std::string& alongside_output) const;
  std::string to_json() const;
};

std::string file_digest_hex(const std::string& path);

}  // namespace clicklab
