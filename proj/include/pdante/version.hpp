#pragma once

namespace pdante {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pdante
