#pragma once

namespace hprbm {

inline constexpr const char* kVersion = "1.0.0";

} // namespace hprbm
