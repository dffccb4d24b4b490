#pragma once

#define GAINLOSS_VERSION "0.1.0"

namespace gainloss {
inline const char* version() { return GAINLOSS_VERSION; }
}  // namespace gainloss
