#include "rankeff/error.hpp"

namespace rankeff {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptySubject: return "EmptySubject";
    case ErrorKind::NonFiniteObservedValue: return "NonFiniteObservedValue";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ComponentWithNoData: return "ComponentWithNoData";
    case ErrorKind::InestimableComponent: return "InestimableComponent";
    case ErrorKind::EverythingFiltered: return "EverythingFiltered";
    case ErrorKind::PatternMismatch: return "PatternMismatch";
    case ErrorKind::NoEstimablePart: return "NoEstimablePart";
    case ErrorKind::ZeroCovariance: return "ZeroCovariance";
    case ErrorKind::ZeroTrace: return "ZeroTrace";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InconsistentWidth: return "InconsistentWidth";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace rankeff
