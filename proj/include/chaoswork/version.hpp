#pragma once

namespace chaoswork {
inline constexpr const char* kVersion = "0.1.0";
}
