#pragma once

#include <spdlog/spdlog.h>

namespace subtrace {

/// Configures the default logger from the SUBTRACE_LOG environment variable
/// (trace, debug, info, warn, error, off). Defaults to warn.
void init_logging();

}  // namespace subtrace
