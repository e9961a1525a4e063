#include "clicklab/manifest.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "clicklab/errors.hpp"
#include "clicklab/rng.hpp"

namespace clicklab {

std::string file_digest_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(ErrorKind::Io, "cannot open " + path + " for digest");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    h = fnv1a64(std::string_view(buffer, static_cast<std::size_t>(in.gcount())), h);
    if (in.eof()) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = "clicklab";
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["wall_time_s"] = wall_time_s;
  j["parameters"] = parameters;
  auto files = [](const std::vector<std::string>& paths) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& path : paths) {
      nlohmann::json entry;
      entry["path"] = path;
      entry["digest_fnv1a64"] = file_digest_hex(path);
      arr.push_back(entry);
    }
    return arr;
  };
  j["inputs"] = files(input_paths);
  j["outputs"] = files(output_paths);
  return j.dump(2);
}

void RunManifest::write(const std::string& alongside_output) const {
  const std::string path = alongside_output + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(ErrorKind::Io, "cannot write manifest " + path);
  out << to_json() << '\n';
  if (!out) throw DataError(ErrorKind::Io, "manifest write failed: " + path);
}

}  // namespace clicklab
