#pragma once

namespace esgea {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace esgea
