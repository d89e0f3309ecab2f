#pragma once

namespace blochwork {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace blochwork
