#pragma once

#include <charconv>
#include <optional>
#include <string>

namespace pinn {

/// Shortest decimal that round-trips to the same double.
inline std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Empty string for a missing value.
inline std::string format_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace pinn
