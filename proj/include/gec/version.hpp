#pragma once

namespace gec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gec
