#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "visionts/frequency.hpp"
#include "visionts/series.hpp"

namespace visionts {

enum class PeriodSource { FrequencyTable, ValidationSelected, Forced };

std::string_view period_source_name(PeriodSource source) noexcept;

struct PeriodChoice {
    std::size_t period = 1;
    PeriodSource source = PeriodSource::FrequencyTable;
};

/// Seasonal candidates for a sampling frequency, most preferred first.
/// Each base seasonality is divided by the multiplier and floored to >= 1;
/// duplicates are dropped and 1 is always the last entry.
std::vector<std::size_t> candidate_periods(const FrequencyTag& freq);

/// Validation loss for a candidate period. Throwing, or returning a
/// non-finite value, marks the candidate as failed.
using PeriodLoss = std::function<double(std::size_t period)>;

/// Argmin of `loss` over `candidates`; ties go to the earlier candidate.
/// Throws SelectionError when candidates is empty or every evaluation fails.
PeriodChoice select_period(const std::vector<std::size_t>& candidates, const PeriodLoss& loss);

/// Defaults for the public long-term benchmark datasets.
struct DatasetPreset {
    std::string_view name;
    FrequencyTag frequency;
    std::size_t period;
    std::size_t context_length;  // 0 when no zero-shot default exists
    double r;
    double c;
    SplitSpec split;
};

/// Lookup by dataset name (case-insensitive, e.g. "ETTh1", "weather").
std::optional<DatasetPreset> find_dataset_preset(std::string_view name);
const std::vector<DatasetPreset>& dataset_presets();

}  // namespace visionts
