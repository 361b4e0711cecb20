#include <cmath>
#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>

#include "subtrace/log.hpp"
#include "subtrace/rng.hpp"

namespace subtrace {

double gaussian(Rng& rng) {
    // Box-Muller; one draw per call keeps the stream position predictable.
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void init_logging() {
    auto logger = spdlog::get("subtrace");
    if (!logger) logger = spdlog::stderr_color_mt("subtrace");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("SUBTRACE_LOG")) level = spdlog::level::from_str(env);
    spdlog::set_level(level);
}

}  // namespace subtrace
