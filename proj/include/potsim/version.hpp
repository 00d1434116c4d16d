#pragma once

#define POTSIM_VERSION "0.1.0"

namespace potsim {
inline constexpr const char* kVersion = POTSIM_VERSION;
}
