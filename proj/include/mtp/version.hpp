#pragma once

namespace mtp {

inline constexpr const char* kVersion = "0.1.0";

} // namespace mtp
