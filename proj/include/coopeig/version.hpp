#pragma once

namespace coopeig {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coopeig
