#pragma once

#include <stdexcept>
#include <string>

namespace macsim {

// Error categories map onto distinct CLI exit codes (see tools/macsim.cpp):
// ConfigError -> 2, DataError -> 3, anything else -> 4.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace macsim
