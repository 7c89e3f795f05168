#include "rcpd/logging.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace rcpd {
namespace {
std::atomic<std::uint64_t> g_warnings{0};
std::atomic<bool> g_muted{false};
std::mutex g_stderr_mutex;
}  // namespace

void log_warning(std::string_view message) {
  g_warnings.fetch_add(1, std::memory_order_relaxed);
  if (g_muted.load(std::memory_order_relaxed)) return;
  std::lock_guard<std::mutex> lock(g_stderr_mutex);
  std::cerr << "rcpd warning: " << message << '\n';
}

std::uint64_t warning_count() { return g_warnings.load(std::memory_order_relaxed); }

bool set_warnings_muted(bool muted) { return g_muted.exchange(muted); }

}  // namespace rcpd
