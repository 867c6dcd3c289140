#pragma once

namespace kout {

inline constexpr const char* version = "0.1.0";

}  // namespace kout
