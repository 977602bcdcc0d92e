#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace srfe::log {

// Verbosity from SRFE_LOG: quiet (default for warn? no: default warn), info, debug.
enum class Level { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level level() {
    static const Level lvl = [] {
        const char* env = std::getenv("SRFE_LOG");
        if (!env) return Level::Warn;
        const std::string s(env);
        if (s == "quiet") return Level::Quiet;
        if (s == "info") return Level::Info;
        if (s == "debug") return Level::Debug;
        return Level::Warn;
    }();
    return lvl;
}

inline void warn(const std::string& msg) {
    if (level() >= Level::Warn) std::cerr << "[srfe] warning: " << msg << '\n';
}

inline void info(const std::string& msg) {
    if (level() >= Level::Info) std::cerr << "[srfe] " << msg << '\n';
}

inline void debug(const std::string& msg) {
    if (level() >= Level::Debug) std::cerr << "[srfe] debug: " << msg << '\n';
}

}  // namespace srfe::log
