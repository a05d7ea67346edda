#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gluco {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "2026-01-01T08:05:00Z" <-> Unix seconds. Only the Z-suffixed UTC form is
// accepted; fractional seconds are not.
std::int64_t parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(std::int64_t epoch_seconds);

inline constexpr std::int64_t kGridSeconds = 300;  // the 5-minute CGM grid

}  // namespace gluco
