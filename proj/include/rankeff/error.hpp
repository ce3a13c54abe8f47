#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rankeff {

enum class ErrorKind {
    DimensionMismatch,
    EmptySubject,
    NonFiniteObservedValue,
    EmptyInput,
    ComponentWithNoData,
    InestimableComponent,
    EverythingFiltered,
    PatternMismatch,
    NoEstimablePart,
    ZeroCovariance,
    ZeroTrace,
    DomainError,
    NotPositiveDefinite,
    InvalidScenario,
    InvalidConfig,
    ParseError,
    InconsistentWidth,
    InvalidArgument,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Where an error happened. Fields that do not apply stay at their defaults.
struct ErrorContext {
    std::size_t line = 0;      // 1-based, 0 = not applicable
    std::size_t column = 0;    // 1-based, 0 = not applicable
    int component = -1;        // 0-based component index
    int group = -1;            // 1 or 2
    std::string key;           // offending configuration key
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, ErrorContext context = {})
        : std::runtime_error(message), kind_(kind), context_(std::move(context)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const ErrorContext& context() const noexcept { return context_; }

private:
    ErrorKind kind_;
    ErrorContext context_;
};

}  // namespace rankeff
