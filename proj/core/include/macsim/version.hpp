#pragma once

namespace macsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace macsim
