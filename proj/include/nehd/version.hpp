#pragma once

namespace nehd {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace nehd
