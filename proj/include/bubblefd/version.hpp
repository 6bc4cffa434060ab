#pragma once

namespace bubblefd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bubblefd
