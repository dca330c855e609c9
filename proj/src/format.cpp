#include "tipsim/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace tipsim {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

std::string format_optional(const std::optional<double>& value) {
    return value ? format_number(*value) : std::string{};
}

}  // namespace tipsim
