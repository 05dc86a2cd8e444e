#pragma once

namespace gmev {
inline constexpr const char* version = "0.1.0";
}
