#include "macsim/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "macsim/error.hpp"
#include "macsim/rng.hpp"

namespace macsim {

uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checksum: cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  return fnv1a64(bytes);
}

std::string checksum_string(uint64_t checksum) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(checksum));
  return std::string("fnv1a64:") + hex;
}

void write_manifest_json(const std::string& path, const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["subcommand"] = manifest.subcommand;
  j["version"] = manifest.version;
  j["status"] = manifest.status;
  j["seed"] = manifest.seed;
  j["duration_seconds"] = manifest.duration_seconds;
  j["inputs"] = manifest.inputs;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
  for (const std::string& artifact : manifest.artifacts) {
    nlohmann::ordered_json entry;
    entry["path"] = artifact;
    // A listed artifact that failed to materialize is still recorded, with
    // the checksum slot explaining why.
    try {
      entry["checksum"] = checksum_string(file_checksum(artifact));
    } catch (const DataError&) {
      entry["checksum"] = "unavailable";
    }
    artifacts.push_back(std::move(entry));
  }
  j["artifacts"] = std::move(artifacts);
  if (!manifest.config_json.empty()) {
    try {
      j["config"] = nlohmann::ordered_json::parse(manifest.config_json);
    } catch (const nlohmann::json::exception&) {
      j["config"] = manifest.config_json;  // keep it as an opaque string
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("manifest: cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace macsim
