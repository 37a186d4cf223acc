#pragma once

namespace rrpolicy {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace rrpolicy
