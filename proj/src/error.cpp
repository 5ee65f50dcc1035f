#include "gdrift/error.hpp"

#include <limits>

namespace gdrift {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::RequiresAtomCondition: return "RequiresAtomCondition";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::ConversionUndefined: return "ConversionUndefined";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NoSolutionAtStart: return "NoSolutionAtStart";
    case ErrorKind::IllPosedScenario: return "IllPosedScenario";
    case ErrorKind::InsufficientPathData: return "InsufficientPathData";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : Error(kind, message, std::numeric_limits<double>::quiet_NaN(),
            std::numeric_limits<double>::quiet_NaN()) {}

Error::Error(ErrorKind kind, const std::string& message, double location, double weight)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind), location_(location), weight_(weight) {}

}  // namespace gdrift
