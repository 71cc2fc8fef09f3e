#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "visionts/frequency.hpp"

namespace visionts {

/// Immutable multivariate series. Values are stored column-major so each
/// variable is one contiguous span (channel-independent access).
class SeriesFrame {
public:
    /// `columns[j]` holds variable j; all columns must have equal length >= 1.
    /// `timestamps`, when non-empty, are epoch seconds (UTC, no zone) and
    /// must match the column length and be strictly increasing.
    SeriesFrame(std::vector<std::vector<double>> columns,
                std::vector<std::string> variable_names,
                FrequencyTag frequency = {},
                std::vector<std::int64_t> timestamps = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t variables() const noexcept { return names_.size(); }

    std::span<const double> column(std::size_t variable) const;
    double at(std::size_t row, std::size_t variable) const;

    const std::vector<std::string>& variable_names() const noexcept { return names_; }
    const FrequencyTag& frequency() const noexcept { return frequency_; }
    bool has_timestamps() const noexcept { return !timestamps_.empty(); }
    const std::vector<std::int64_t>& timestamps() const noexcept { return timestamps_; }

    /// Rows [begin, end) as a new frame (timestamps sliced alongside).
    SeriesFrame slice(std::size_t begin, std::size_t end) const;

private:
    std::size_t rows_ = 0;
    std::vector<double> values_;  // column-major, rows_ * variables()
    std::vector<std::string> names_;
    FrequencyTag frequency_;
    std::vector<std::int64_t> timestamps_;
};

struct IngestionOptions {
    /// nullopt: a first column whose header is "date" is treated as the
    /// timestamp column. true/false forces the behaviour.
    std::optional<bool> timestamp_column;
    /// When set, timestamps (if any) are validated against it. When unset
    /// the tag is inferred from timestamps, or OTHER without them.
    std::optional<FrequencyTag> frequency;
};

SeriesFrame parse_csv(const std::string& path, const IngestionOptions& options = {});
SeriesFrame parse_csv_text(std::string_view text, const IngestionOptions& options = {});

/// Writes values with shortest round-trip formatting so that parse_csv
/// reproduces them bit-exactly.
void write_csv(const SeriesFrame& frame, const std::string& path);
std::string format_csv(const SeriesFrame& frame);

/// "YYYY-MM-DD", "YYYY-MM-DD HH:MM" or "YYYY-MM-DD HH:MM:SS" (also with 'T').
std::optional<std::int64_t> parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t epoch_seconds);

/// Fractions of the row count. train = floor(T*train), test = floor(T*test),
/// validation takes the remainder.
struct SplitRatios {
    double train = 0.7;
    double val = 0.1;
    double test = 0.2;
};

/// Absolute boundaries: train [0, train_end), val [train_end, val_end),
/// test [val_end, test_end). Rows past test_end are not used.
struct SplitBounds {
    std::size_t train_end = 0;
    std::size_t val_end = 0;
    std::size_t test_end = 0;
};

using SplitSpec = std::variant<SplitRatios, SplitBounds>;

struct SplitResult {
    SeriesFrame train;
    SeriesFrame val;
    SeriesFrame test;
    /// Global row indices in the source frame; windows evaluated on a split
    /// may draw context from rows before its begin index.
    SplitBounds bounds;
};

SplitResult split(const SeriesFrame& frame, const SplitSpec& spec);
SplitBounds resolve_split(std::size_t rows, const SplitSpec& spec);

/// Parses "0.7,0.1,0.2" (ratios, all <= 1) or "8640,2880,2880" (sizes) or
/// "0..7,7..8,8..10" (absolute ranges).
SplitSpec parse_split(std::string_view text);

struct WindowPair {
    std::vector<double> context;
    std::vector<double> target;
    std::size_t variable_index = 0;
    /// Row index of the first target value; context is rows [origin - L, origin).
    std::size_t origin = 0;
};

/// Closed-form window count per variable: floor((T - L - H) / stride) + 1.
std::size_t window_count(std::size_t rows, std::size_t context, std::size_t horizon,
                         std::size_t stride);

/// Every window per variable whose target lies inside the frame, origins
/// advancing by `stride`. Variables are emitted one after another.
std::vector<WindowPair> sliding_windows(const SeriesFrame& frame, std::size_t context,
                                        std::size_t horizon, std::size_t stride);

/// Origins of windows whose target lies fully in [target_begin, target_end)
/// and whose context (length L) starts at or after row 0.
std::vector<std::size_t> window_origins(std::size_t target_begin, std::size_t target_end,
                                        std::size_t context, std::size_t horizon,
                                        std::size_t stride);

}  // namespace visionts
