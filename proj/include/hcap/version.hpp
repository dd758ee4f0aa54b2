#pragma once

namespace hcap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hcap
