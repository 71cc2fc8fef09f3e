#include "visionts/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "visionts/errors.hpp"

namespace visionts {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Month index (year*12 + month-1) plus the remainder inside the month.
std::pair<std::int64_t, std::int64_t> month_key(std::int64_t t) {
    const std::int64_t days = floor_div(t, 86400);
    const Civil c = civil_from_days(days);
    return {c.year * 12 + (c.month - 1), t - days_from_civil(c.year, c.month, 1) * 86400};
}

bool calendar_steps(const std::vector<std::int64_t>& ts, std::int64_t months) {
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (month_key(ts[i]).first - month_key(ts[i - 1]).first != months) return false;
    }
    return true;
}

FrequencyTag infer_frequency(const std::vector<std::int64_t>& ts) {
    if (ts.size() < 2) return {};
    const std::int64_t step = ts[1] - ts[0];
    bool constant = true;
    for (std::size_t i = 2; i < ts.size() && constant; ++i) constant = (ts[i] - ts[i - 1]) == step;
    if (constant) {
        struct Unit {
            FrequencyUnit unit;
            std::int64_t seconds;
        };
        constexpr Unit units[] = {{FrequencyUnit::W, 604800}, {FrequencyUnit::D, 86400},
                                  {FrequencyUnit::H, 3600},   {FrequencyUnit::T, 60},
                                  {FrequencyUnit::S, 1}};
        for (const auto& u : units) {
            if (step % u.seconds == 0)
                return {u.unit, static_cast<std::uint32_t>(step / u.seconds)};
        }
    }
    const std::int64_t months = month_key(ts[1]).first - month_key(ts[0]).first;
    if (months >= 1 && calendar_steps(ts, months)) {
        if (months % 3 == 0) return {FrequencyUnit::Q, static_cast<std::uint32_t>(months / 3)};
        return {FrequencyUnit::M, static_cast<std::uint32_t>(months)};
    }
    return {};
}

void validate_timestamps(const std::vector<std::int64_t>& ts, const FrequencyTag& tag) {
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] <= ts[i - 1])
            throw IngestionError(i + 2, 1, "timestamps must be strictly increasing");
    }
    const std::int64_t step = frequency_step_seconds(tag);
    if (step > 0) {
        for (std::size_t i = 1; i < ts.size(); ++i) {
            if (ts[i] - ts[i - 1] != step)
                throw IngestionError(i + 2, 1,
                                     "timestamp step inconsistent with frequency " +
                                         format_frequency(tag));
        }
    } else if (tag.unit == FrequencyUnit::M || tag.unit == FrequencyUnit::Q) {
        const std::int64_t months =
            static_cast<std::int64_t>(tag.multiplier) * (tag.unit == FrequencyUnit::Q ? 3 : 1);
        if (!calendar_steps(ts, months))
            throw IngestionError("timestamps inconsistent with frequency " + format_frequency(tag));
    }
}

void format_double(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

SeriesFrame::SeriesFrame(std::vector<std::vector<double>> columns,
                         std::vector<std::string> variable_names, FrequencyTag frequency,
                         std::vector<std::int64_t> timestamps)
    : names_(std::move(variable_names)),
      frequency_(frequency),
      timestamps_(std::move(timestamps)) {
    if (columns.empty()) throw IngestionError("series needs at least one variable");
    if (columns.size() != names_.size())
        throw IngestionError("variable name count does not match column count");
    rows_ = columns.front().size();
    if (rows_ == 0) throw IngestionError("series needs at least one row");
    values_.reserve(rows_ * columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows_) throw IngestionError("columns have unequal lengths");
        for (std::size_t i = 0; i < rows_; ++i) {
            if (!std::isfinite(columns[j][i]))
                throw IngestionError(i + 1, j + 1, "non-finite value");
        }
        values_.insert(values_.end(), columns[j].begin(), columns[j].end());
    }
    if (frequency_.unit == FrequencyUnit::OTHER) frequency_.multiplier = 1;
    if (frequency_.multiplier == 0) throw IngestionError("frequency multiplier must be >= 1");
    if (!timestamps_.empty()) {
        if (timestamps_.size() != rows_) throw IngestionError("timestamp count does not match rows");
        validate_timestamps(timestamps_, frequency_);
    }
}

std::span<const double> SeriesFrame::column(std::size_t variable) const {
    if (variable >= variables()) throw WindowError("variable index out of range");
    return {values_.data() + variable * rows_, rows_};
}

double SeriesFrame::at(std::size_t row, std::size_t variable) const {
    return column(variable)[row];
}

SeriesFrame SeriesFrame::slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > rows_) throw SplitError("slice range out of bounds");
    std::vector<std::vector<double>> cols;
    cols.reserve(variables());
    for (std::size_t j = 0; j < variables(); ++j) {
        auto c = column(j);
        cols.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(begin),
                          c.begin() + static_cast<std::ptrdiff_t>(end));
    }
    std::vector<std::int64_t> ts;
    if (has_timestamps())
        ts.assign(timestamps_.begin() + static_cast<std::ptrdiff_t>(begin),
                  timestamps_.begin() + static_cast<std::ptrdiff_t>(end));
    return SeriesFrame(std::move(cols), names_, frequency_, std::move(ts));
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
    text = unquote(text);
    auto num = [&](std::size_t pos, std::size_t len, int& out) {
        if (pos + len > text.size()) return false;
        auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return res.ec == std::errc() && res.ptr == text.data() + pos + len;
    };
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (text.size() < 10 || !num(0, 4, y) || text[4] != '-' || !num(5, 2, mo) || text[7] != '-' ||
        !num(8, 2, d))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
    if (text.size() > 10) {
        if ((text[10] != ' ' && text[10] != 'T') || text.size() < 16 || !num(11, 2, h) ||
            text[13] != ':' || !num(14, 2, mi))
            return std::nullopt;
        if (text.size() > 16) {
            if (text.size() != 19 || text[16] != ':' || !num(17, 2, s)) return std::nullopt;
        }
        if (h > 23 || mi > 59 || s > 60) return std::nullopt;
    }
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
           h * 3600 + mi * 60 + s;
}

std::string format_timestamp(std::int64_t t) {
    const std::int64_t days = floor_div(t, 86400);
    const Civil c = civil_from_days(days);
    const std::int64_t sec = t - days * 86400;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u %02lld:%02lld:%02lld",
                  static_cast<long long>(c.year), c.month, c.day,
                  static_cast<long long>(sec / 3600), static_cast<long long>((sec / 60) % 60),
                  static_cast<long long>(sec % 60));
    return buf;
}

SeriesFrame parse_csv_text(std::string_view text, const IngestionOptions& options) {
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start < text.size()) {
            auto nl = text.find('\n', start);
            if (nl == std::string_view::npos) nl = text.size();
            auto line = text.substr(start, nl - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lines.push_back(line);
            start = nl + 1;
        }
        while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    }
    if (lines.empty()) throw IngestionError("empty file");
    if (lines.front().size() >= 3 && lines.front().substr(0, 3) == "\xEF\xBB\xBF")
        lines.front().remove_prefix(3);

    const auto header = split_fields(lines.front());
    const bool has_ts = options.timestamp_column.value_or(unquote(header.front()) == "date");
    const std::size_t first_value = has_ts ? 1 : 0;
    if (header.size() <= first_value) throw IngestionError(1, 1, "no numeric columns in header");
    if (lines.size() < 2) throw IngestionError("no data rows");

    std::vector<std::string> names;
    for (std::size_t j = first_value; j < header.size(); ++j) names.emplace_back(unquote(header[j]));

    std::vector<std::vector<double>> cols(names.size());
    for (auto& c : cols) c.reserve(lines.size() - 1);
    std::vector<std::int64_t> ts;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        if (fields.size() != header.size())
            throw IngestionError(i + 1, std::min(fields.size(), header.size()) + 1,
                                 "ragged row: expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(fields.size()));
        if (has_ts) {
            auto t = parse_timestamp(fields[0]);
            if (!t) throw IngestionError(i + 1, 1, "unparseable timestamp");
            ts.push_back(*t);
        }
        for (std::size_t j = first_value; j < fields.size(); ++j) {
            auto cell = unquote(fields[j]);
            if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw IngestionError(i + 1, j + 1, "non-numeric cell '" + std::string(cell) + "'");
            if (!std::isfinite(v)) throw IngestionError(i + 1, j + 1, "non-finite value");
            cols[j - first_value].push_back(v);
        }
    }

    FrequencyTag freq = options.frequency.value_or(has_ts ? infer_frequency(ts) : FrequencyTag{});
    return SeriesFrame(std::move(cols), std::move(names), freq, std::move(ts));
}

SeriesFrame parse_csv(const std::string& path, const IngestionOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv_text(ss.str(), options);
}

std::string format_csv(const SeriesFrame& frame) {
    std::string out;
    if (frame.has_timestamps()) out += "date,";
    for (std::size_t j = 0; j < frame.variables(); ++j) {
        if (j) out += ',';
        out += frame.variable_names()[j];
    }
    out += '\n';
    for (std::size_t i = 0; i < frame.rows(); ++i) {
        if (frame.has_timestamps()) {
            out += format_timestamp(frame.timestamps()[i]);
            out += ',';
        }
        for (std::size_t j = 0; j < frame.variables(); ++j) {
            if (j) out += ',';
            format_double(out, frame.at(i, j));
        }
        out += '\n';
    }
    return out;
}

void write_csv(const SeriesFrame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << format_csv(frame);
}

SplitBounds resolve_split(std::size_t rows, const SplitSpec& spec) {
    if (const auto* r = std::get_if<SplitRatios>(&spec)) {
        if (!(r->train > 0) || !(r->val >= 0) || !(r->test > 0) ||
            r->train + r->val + r->test > 1.0 + 1e-9)
            throw SplitError("ratios must be positive and sum to at most 1");
        const double t = static_cast<double>(rows);
        const auto train = static_cast<std::size_t>(std::floor(t * r->train + 1e-9));
        const auto test = static_cast<std::size_t>(std::floor(t * r->test + 1e-9));
        if (train + test > rows) throw SplitError("ratios exceed the row count");
        return {train, rows - test, rows};
    }
    const auto& b = std::get<SplitBounds>(spec);
    if (!(b.train_end <= b.val_end && b.val_end <= b.test_end && b.test_end <= rows))
        throw SplitError("boundaries must be ordered and within [0, " + std::to_string(rows) + "]");
    return b;
}

SplitResult split(const SeriesFrame& frame, const SplitSpec& spec) {
    const SplitBounds b = resolve_split(frame.rows(), spec);
    if (b.train_end == 0 || b.val_end == b.train_end || b.test_end == b.val_end)
        throw SplitError("every part of the split must hold at least one row");
    return {frame.slice(0, b.train_end), frame.slice(b.train_end, b.val_end),
            frame.slice(b.val_end, b.test_end), b};
}

SplitSpec parse_split(std::string_view text) {
    auto parts = split_fields(text);
    if (parts.size() != 3) throw ConfigError("split needs three comma-separated parts");
    if (text.find("..") != std::string_view::npos) {
        std::size_t lo[3], hi[3];
        for (int k = 0; k < 3; ++k) {
            auto p = trim(parts[k]);
            auto dots = p.find("..");
            if (dots == std::string_view::npos) throw ConfigError("expected range a..b");
            auto a = p.substr(0, dots), bb = p.substr(dots + 2);
            if (std::from_chars(a.data(), a.data() + a.size(), lo[k]).ec != std::errc() ||
                std::from_chars(bb.data(), bb.data() + bb.size(), hi[k]).ec != std::errc())
                throw ConfigError("bad split range '" + std::string(p) + "'");
        }
        if (lo[0] != 0 || lo[1] != hi[0] || lo[2] != hi[1])
            throw SplitError("split ranges must be contiguous and start at 0");
        return SplitBounds{hi[0], hi[1], hi[2]};
    }
    double v[3];
    for (int k = 0; k < 3; ++k) {
        auto p = trim(parts[k]);
        auto res = std::from_chars(p.data(), p.data() + p.size(), v[k]);
        if (res.ec != std::errc() || res.ptr != p.data() + p.size())
            throw ConfigError("bad split value '" + std::string(p) + "'");
    }
    if (v[0] <= 1.0 && v[1] <= 1.0 && v[2] <= 1.0) return SplitRatios{v[0], v[1], v[2]};
    const auto a = static_cast<std::size_t>(v[0]), b = static_cast<std::size_t>(v[1]),
               c = static_cast<std::size_t>(v[2]);
    return SplitBounds{a, a + b, a + b + c};
}

std::size_t window_count(std::size_t rows, std::size_t context, std::size_t horizon,
                         std::size_t stride) {
    if (context == 0 || horizon == 0 || stride == 0)
        throw WindowError("context, horizon and stride must be >= 1");
    if (rows < context + horizon)
        throw WindowError("series of " + std::to_string(rows) + " rows is shorter than L + H = " +
                          std::to_string(context + horizon));
    return (rows - context - horizon) / stride + 1;
}

std::vector<WindowPair> sliding_windows(const SeriesFrame& frame, std::size_t context,
                                        std::size_t horizon, std::size_t stride) {
    const std::size_t per_var = window_count(frame.rows(), context, horizon, stride);
    std::vector<WindowPair> out;
    out.reserve(per_var * frame.variables());
    for (std::size_t v = 0; v < frame.variables(); ++v) {
        const auto col = frame.column(v);
        for (std::size_t k = 0; k < per_var; ++k) {
            const std::size_t origin = context + k * stride;
            WindowPair w;
            w.context.assign(col.begin() + static_cast<std::ptrdiff_t>(origin - context),
                             col.begin() + static_cast<std::ptrdiff_t>(origin));
            w.target.assign(col.begin() + static_cast<std::ptrdiff_t>(origin),
                            col.begin() + static_cast<std::ptrdiff_t>(origin + horizon));
            w.variable_index = v;
            w.origin = origin;
            out.push_back(std::move(w));
        }
    }
    return out;
}

std::vector<std::size_t> window_origins(std::size_t target_begin, std::size_t target_end,
                                        std::size_t context, std::size_t horizon,
                                        std::size_t stride) {
    if (context == 0 || horizon == 0 || stride == 0)
        throw WindowError("context, horizon and stride must be >= 1");
    const std::size_t first = std::max(target_begin, context);
    if (target_end < first + horizon)
        throw WindowError("no window of L=" + std::to_string(context) + ", H=" +
                          std::to_string(horizon) + " fits target rows [" +
                          std::to_string(target_begin) + ", " + std::to_string(target_end) + ")");
    std::vector<std::size_t> out;
    for (std::size_t t = first; t + horizon <= target_end; t += stride) out.push_back(t);
    return out;
}

}  // namespace visionts
