#pragma once

namespace afdm {

inline constexpr const char* kVersion = "afdm-sim-0.1.0";

}  // namespace afdm
