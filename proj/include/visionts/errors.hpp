#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace visionts {

enum class ErrorKind {
    Ingestion,
    Split,
    Window,
    Selection,
    Segment,
    Capacity,
    Load,
    Shape,
    Numerics,
    Metric,
    Baseline,
    Aggregation,
    Config,
    Io,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Base of every error raised by the engine. `kind()` identifies the
/// failing module/contract; `what()` carries "<KindName>: <detail>".
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

class IngestionError : public Error {
public:
    explicit IngestionError(const std::string& detail)
        : Error(ErrorKind::Ingestion, detail) {}
    IngestionError(std::size_t row, std::size_t col, const std::string& detail);

    // 1-based file line and 1-based column of the offending cell (0 when
    // the error is not tied to a cell).
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_ = 0;
    std::size_t col_ = 0;
};

class SplitError : public Error {
public:
    explicit SplitError(const std::string& d) : Error(ErrorKind::Split, d) {}
};
class WindowError : public Error {
public:
    explicit WindowError(const std::string& d) : Error(ErrorKind::Window, d) {}
};
class SelectionError : public Error {
public:
    explicit SelectionError(const std::string& d) : Error(ErrorKind::Selection, d) {}
};
class SegmentError : public Error {
public:
    explicit SegmentError(const std::string& d) : Error(ErrorKind::Segment, d) {}
};
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& d) : Error(ErrorKind::Capacity, d) {}
};
class LoadError : public Error {
public:
    explicit LoadError(const std::string& d) : Error(ErrorKind::Load, d) {}
};
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& d) : Error(ErrorKind::Shape, d) {}
};
class NumericsError : public Error {
public:
    explicit NumericsError(const std::string& d) : Error(ErrorKind::Numerics, d) {}
};
class MetricError : public Error {
public:
    explicit MetricError(const std::string& d) : Error(ErrorKind::Metric, d) {}
};
class BaselineError : public Error {
public:
    explicit BaselineError(const std::string& d) : Error(ErrorKind::Baseline, d) {}
};
class AggregationError : public Error {
public:
    explicit AggregationError(const std::string& d) : Error(ErrorKind::Aggregation, d) {}
};
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& d) : Error(ErrorKind::Config, d) {}
};
class IoError : public Error {
public:
    explicit IoError(const std::string& d) : Error(ErrorKind::Io, d) {}
};

/// Throws the concrete subclass for `kind`, so callers can re-raise with
/// added context without losing the catchable type.
[[noreturn]] void throw_error(ErrorKind kind, const std::string& detail);

}  // namespace visionts
