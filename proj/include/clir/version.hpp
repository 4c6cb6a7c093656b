#pragma once

namespace clir {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace clir
