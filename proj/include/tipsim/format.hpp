#pragma once

#include <optional>
#include <string>

namespace tipsim {

/// Shortest round-trip decimal form; never locale-dependent.
std::string format_number(double value);

/// Empty string for nullopt, otherwise format_number.
std::string format_optional(const std::optional<double>& value);

}  // namespace tipsim
