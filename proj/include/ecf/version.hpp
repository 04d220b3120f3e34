#pragma once

namespace ecf {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ecf
