#pragma once

namespace rangekit {

inline constexpr const char* kToolName = "rangekit";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace rangekit
