#pragma once

namespace graphspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace graphspec
