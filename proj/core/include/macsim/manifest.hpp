#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace macsim {

// fnv1a64 over the file's bytes; cheap integrity check for reproducibility
// comparisons, not a cryptographic digest.
uint64_t file_checksum(const std::string& path);
std::string checksum_string(uint64_t checksum);  // "fnv1a64:<16 hex digits>"

// What a CLI run did: enough to reproduce it (resolved config + master seed)
// and to verify its outputs (per-artifact checksums). Written even when the
// run fails, with status carrying the error.
struct RunManifest {
  std::string subcommand;
  std::string config_json;  // resolved configuration snapshot
  uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> artifacts;  // paths; checksummed at write time
  double duration_seconds = 0.0;
  std::string status = "ok";  // "ok" or "error: <what>"
  std::string version;
};

void write_manifest_json(const std::string& path, const RunManifest& manifest);

}  // namespace macsim
