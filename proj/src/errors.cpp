#include "visionts/errors.hpp"

namespace visionts {

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Ingestion: return "IngestionError";
        case ErrorKind::Split: return "SplitError";
        case ErrorKind::Window: return "WindowError";
        case ErrorKind::Selection: return "SelectionError";
        case ErrorKind::Segment: return "SegmentError";
        case ErrorKind::Capacity: return "CapacityError";
        case ErrorKind::Load: return "LoadError";
        case ErrorKind::Shape: return "ShapeError";
        case ErrorKind::Numerics: return "NumericsError";
        case ErrorKind::Metric: return "MetricError";
        case ErrorKind::Baseline: return "BaselineError";
        case ErrorKind::Aggregation: return "AggregationError";
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

IngestionError::IngestionError(std::size_t row, std::size_t col, const std::string& detail)
    : Error(ErrorKind::Ingestion,
            "row " + std::to_string(row) + ", column " + std::to_string(col) + ": " + detail),
      row_(row),
      col_(col) {}

void throw_error(ErrorKind kind, const std::string& detail) {
    switch (kind) {
        case ErrorKind::Ingestion: throw IngestionError(detail);
        case ErrorKind::Split: throw SplitError(detail);
        case ErrorKind::Window: throw WindowError(detail);
        case ErrorKind::Selection: throw SelectionError(detail);
        case ErrorKind::Segment: throw SegmentError(detail);
        case ErrorKind::Capacity: throw CapacityError(detail);
        case ErrorKind::Load: throw LoadError(detail);
        case ErrorKind::Shape: throw ShapeError(detail);
        case ErrorKind::Numerics: throw NumericsError(detail);
        case ErrorKind::Metric: throw MetricError(detail);
        case ErrorKind::Baseline: throw BaselineError(detail);
        case ErrorKind::Aggregation: throw AggregationError(detail);
        case ErrorKind::Config: throw ConfigError(detail);
        case ErrorKind::Io: throw IoError(detail);
    }
    throw Error(kind, detail);
}

}  // namespace visionts
