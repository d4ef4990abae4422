#pragma once

namespace feller {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace feller
