#pragma once

namespace mgchain {

inline constexpr const char* kVersion = "1.0.0";

} // namespace mgchain
