#pragma once

namespace fastr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fastr
