#pragma once

namespace solerwave {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1.0";

}  // namespace solerwave
