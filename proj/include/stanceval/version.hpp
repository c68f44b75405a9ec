#pragma once

namespace stanceval {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stanceval
