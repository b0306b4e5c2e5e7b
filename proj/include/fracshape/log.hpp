// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sstream>
#include <string>

namespace fracshape {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level comes from the FRACSHAPE_LOG environment variable (error|info|debug),
// read once. Logging never changes results, only stderr verbosity.
LogLevel log_level();
void log_message(LogLevel level, const std::string& msg);

template <typename... Args>
void log_info(Args&&... args) {
    if (log_level() < LogLevel::info) return;
    std::ostringstream os;
    (os << ... << args);
    log_message(LogLevel::info, os.str());
}

template <typename... Args>
void log_debug(Args&&... args) {
    if (log_level() < LogLevel::debug) return;
    std::ostringstream os;
    (os << ... << args);
    log_message(LogLevel::debug, os.str());
}

template <typename... Args>
void log_error(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    log_message(LogLevel::error, os.str());
}

}  // namespace fracshape
