#include "visionts/periodicity.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "visionts/errors.hpp"

namespace visionts {

namespace {

// Base seasonalities in units of one sampling step (multiplier 1).
std::vector<std::size_t> base_seasonalities(FrequencyUnit unit) {
    switch (unit) {
        case FrequencyUnit::S: return {3600};
        case FrequencyUnit::T: return {1440, 10080};
        case FrequencyUnit::H: return {24, 168};
        case FrequencyUnit::D: return {7, 30, 365};
        case FrequencyUnit::W: return {52, 4};
        case FrequencyUnit::M: return {12, 6, 3};
        case FrequencyUnit::B: return {5};
        case FrequencyUnit::Q: return {4, 2};
        case FrequencyUnit::OTHER: return {};
    }
    return {};
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

FrequencyTag parse_frequency(std::string_view text) {
    if (text == "OTHER" || text == "other") return {};
    std::uint32_t mult = 1;
    std::size_t pos = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos > 0) {
        auto res = std::from_chars(text.data(), text.data() + pos, mult);
        if (res.ec != std::errc() || mult == 0)
            throw ConfigError("bad frequency multiplier in '" + std::string(text) + "'");
    }
    auto unit = text.substr(pos);
    if (unit == "min") return {FrequencyUnit::T, mult};
    if (unit.size() == 1) {
        switch (unit[0]) {
            case 'S': return {FrequencyUnit::S, mult};
            case 'T': return {FrequencyUnit::T, mult};
            case 'H': return {FrequencyUnit::H, mult};
            case 'D': return {FrequencyUnit::D, mult};
            case 'W': return {FrequencyUnit::W, mult};
            case 'M': return {FrequencyUnit::M, mult};
            case 'B': return {FrequencyUnit::B, mult};
            case 'Q': return {FrequencyUnit::Q, mult};
            default: break;
        }
    }
    throw ConfigError("unknown frequency '" + std::string(text) + "'");
}

std::string format_frequency(const FrequencyTag& tag) {
    static constexpr const char* letters[] = {"S", "T", "H", "D", "W", "M", "B", "Q", "OTHER"};
    std::string unit = letters[static_cast<int>(tag.unit)];
    if (tag.unit == FrequencyUnit::OTHER || tag.multiplier == 1) return unit;
    return std::to_string(tag.multiplier) + unit;
}

std::int64_t frequency_step_seconds(const FrequencyTag& tag) noexcept {
    std::int64_t base = 0;
    switch (tag.unit) {
        case FrequencyUnit::S: base = 1; break;
        case FrequencyUnit::T: base = 60; break;
        case FrequencyUnit::H: base = 3600; break;
        case FrequencyUnit::D: base = 86400; break;
        case FrequencyUnit::W: base = 604800; break;
        default: return 0;
    }
    return base * static_cast<std::int64_t>(tag.multiplier);
}

std::string_view period_source_name(PeriodSource source) noexcept {
    switch (source) {
        case PeriodSource::FrequencyTable: return "FREQUENCY_TABLE";
        case PeriodSource::ValidationSelected: return "VALIDATION_SELECTED";
        case PeriodSource::Forced: return "FORCED";
    }
    return "UNKNOWN";
}

std::vector<std::size_t> candidate_periods(const FrequencyTag& freq) {
    std::vector<std::size_t> out;
    const std::size_t x = freq.unit == FrequencyUnit::OTHER ? 1 : std::max<std::size_t>(1, freq.multiplier);
    for (std::size_t s : base_seasonalities(freq.unit)) {
        const std::size_t p = std::max<std::size_t>(1, s / x);
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    // 1 closes the list even when a seasonality already floored to it.
    std::erase(out, std::size_t{1});
    out.push_back(1);
    return out;
}

PeriodChoice select_period(const std::vector<std::size_t>& candidates, const PeriodLoss& loss) {
    if (candidates.empty()) throw SelectionError("no candidate periods");
    std::optional<std::size_t> best;
    double best_loss = 0.0;
    std::string failures;
    for (std::size_t p : candidates) {
        double l = 0.0;
        try {
            l = loss(p);
        } catch (const std::exception& e) {
            failures += " P=" + std::to_string(p) + " (" + e.what() + ");";
            continue;
        }
        if (!std::isfinite(l)) {
            failures += " P=" + std::to_string(p) + " (non-finite loss);";
            continue;
        }
        if (!best || l < best_loss) {
            best = p;
            best_loss = l;
        }
    }
    if (!best) throw SelectionError("every candidate period failed:" + failures);
    return {*best, PeriodSource::ValidationSelected};
}

const std::vector<DatasetPreset>& dataset_presets() {
    // Splits follow the usual 12/4/4-month ETT layout and 70/10/20 ratios
    // for the rest.
    static const std::vector<DatasetPreset> presets = {
        {"ETTh1", {FrequencyUnit::H, 1}, 24, 2880, 0.4, 0.4, SplitBounds{8640, 11520, 14400}},
        {"ETTh2", {FrequencyUnit::H, 1}, 24, 1728, 0.4, 0.4, SplitBounds{8640, 11520, 14400}},
        {"ETTm1", {FrequencyUnit::T, 15}, 96, 2304, 0.4, 0.4, SplitBounds{34560, 46080, 57600}},
        {"ETTm2", {FrequencyUnit::T, 15}, 96, 4032, 0.4, 0.4, SplitBounds{34560, 46080, 57600}},
        {"Weather", {FrequencyUnit::T, 10}, 144, 4032, 0.4, 0.4, SplitRatios{}},
        {"Electricity", {FrequencyUnit::H, 1}, 24, 2880, 0.4, 0.4, SplitRatios{}},
        {"Traffic", {FrequencyUnit::H, 1}, 24, 0, 0.4, 0.4, SplitRatios{}},
        {"Illness", {FrequencyUnit::W, 1}, 52, 104, 0.4, 0.4, SplitRatios{}},
    };
    return presets;
}

std::optional<DatasetPreset> find_dataset_preset(std::string_view name) {
    for (const auto& p : dataset_presets()) {
        if (iequals(p.name, name)) return p;
    }
    if (iequals(name, "ECL")) return find_dataset_preset("Electricity");
    if (iequals(name, "national_illness")) return find_dataset_preset("Illness");
    return std::nullopt;
}

}  // namespace visionts
