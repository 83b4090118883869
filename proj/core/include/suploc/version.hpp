#pragma once

namespace suploc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace suploc
