#pragma once

#include <spdlog/spdlog.h>

namespace pillarqed
{

// Shared stderr logger. Verbosity comes from PILLAR_QED_LOG (trace, debug, info, warn, error, off);
// default is warn.
spdlog::logger& log();

} // namespace pillarqed
