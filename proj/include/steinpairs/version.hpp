#pragma once

namespace steinpairs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace steinpairs
