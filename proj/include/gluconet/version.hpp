#pragma once

namespace gluconet {

inline constexpr const char* kVersion = "0.1.0";

}
