#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gdrift {

enum class ErrorKind {
    InvalidInterval,
    InvalidMeasure,
    RequiresAtomCondition,
    OutOfRange,
    ConversionUndefined,
    InvalidParameter,
    NoSolutionAtStart,
    IllPosedScenario,
    InsufficientPathData,
    UnknownScenario,
    ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Library error. `location` and `weight` are set for the atom-related kinds
/// (RequiresAtomCondition, ConversionUndefined, NoSolutionAtStart) and NaN otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    Error(ErrorKind kind, const std::string& message, double location, double weight);

    ErrorKind kind() const noexcept { return kind_; }
    double location() const noexcept { return location_; }
    double weight() const noexcept { return weight_; }

private:
    ErrorKind kind_;
    double location_;
    double weight_;
};

}  // namespace gdrift
