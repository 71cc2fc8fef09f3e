#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace visionts {

enum class FrequencyUnit { S, T, H, D, W, M, B, Q, OTHER };

/// Sampling frequency as a unit plus integer multiplier, e.g. "15T" is
/// fifteen-minute sampling. OTHER always carries multiplier 1.
struct FrequencyTag {
    FrequencyUnit unit = FrequencyUnit::OTHER;
    std::uint32_t multiplier = 1;

    friend bool operator==(const FrequencyTag&, const FrequencyTag&) = default;
};

/// Accepts "H", "15T", "10T", "W", "OTHER", ... (case-sensitive unit letter,
/// optional positive integer prefix). Throws ConfigError on anything else.
FrequencyTag parse_frequency(std::string_view text);

std::string format_frequency(const FrequencyTag& tag);

/// Fixed step in seconds for S/T/H/D/W; 0 for calendar-based or OTHER units.
std::int64_t frequency_step_seconds(const FrequencyTag& tag) noexcept;

}  // namespace visionts
