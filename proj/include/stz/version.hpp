#pragma once

namespace stz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stz
