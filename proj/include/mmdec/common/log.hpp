#pragma once

#include <cstddef>
#include <string_view>

namespace mmdec {

enum class LogLevel { Debug, Info, Warning, Error };

void log(LogLevel level, std::string_view message);
inline void log_warning(std::string_view message) { log(LogLevel::Warning, message); }
inline void log_info(std::string_view message) { log(LogLevel::Info, message); }

// Messages below this level are dropped. Defaults to Info.
void set_log_level(LogLevel level);

// Number of warnings emitted so far in this process.
std::size_t warning_count();

}  // namespace mmdec
