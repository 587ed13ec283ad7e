#pragma once

namespace origin {

inline constexpr const char* kVersion = "0.1.0";

} // namespace origin
