#include "mmdec/common/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace mmdec {
namespace {

std::atomic<int> g_level{static_cast<int>(LogLevel::Info)};
std::atomic<std::size_t> g_warnings{0};
std::mutex g_mutex;

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warning: return "warning";
    case LogLevel::Error: return "error";
  }
  return "?";
}

}  // namespace

void log(LogLevel level, std::string_view message) {
  if (level == LogLevel::Warning) ++g_warnings;
  if (static_cast<int>(level) < g_level.load()) return;
  std::lock_guard lock(g_mutex);
  std::clog << "[" << tag(level) << "] " << message << '\n';
}

void set_log_level(LogLevel level) { g_level = static_cast<int>(level); }

std::size_t warning_count() { return g_warnings.load(); }

}  // namespace mmdec
