#pragma once

#include <string_view>

namespace rngkit {

inline constexpr std::string_view kToolName = "rngkit";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace rngkit
