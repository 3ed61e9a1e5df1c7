#pragma once

namespace plap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace plap
