#pragma once

namespace snq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace snq
