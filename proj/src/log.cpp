#include "pillarqed/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <memory>

namespace pillarqed
{

spdlog::logger& log()
{
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto logger = std::make_shared<spdlog::logger>(
            "pillar_qed", std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
        logger->set_pattern("[%l] %v");
        auto level = spdlog::level::warn;
        if (const char* env = std::getenv("PILLAR_QED_LOG"))
            level = spdlog::level::from_str(env);
        logger->set_level(level);
        return logger;
    }();
    return *instance;
}

} // namespace pillarqed
