#pragma once

namespace g0gd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace g0gd
