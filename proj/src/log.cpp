// SPDX-License-Identifier: Apache-2.0
#include "fracshape/log.hpp"

#include <cstdlib>
#include <iostream>

namespace fracshape {

static LogLevel parse_level() {
    const char* env = std::getenv("FRACSHAPE_LOG");
    if (!env) return LogLevel::error;
    std::string s(env);
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    return LogLevel::error;
}

LogLevel log_level() {
    static const LogLevel level = parse_level();
    return level;
}

void log_message(LogLevel level, const std::string& msg) {
    static const char* names[] = {"error", "info", "debug"};
    std::cerr << "[fracshape:" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

}  // namespace fracshape
