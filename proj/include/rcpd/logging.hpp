#pragma once

#include <cstdint>
#include <string_view>

namespace rcpd {

/// Writes a warning line to stderr unless warnings are muted, and counts it.
void log_warning(std::string_view message);

/// Number of warnings raised since process start (muted ones included).
std::uint64_t warning_count();

/// Mutes stderr output for warnings. Returns the previous setting.
bool set_warnings_muted(bool muted);

}  // namespace rcpd
