#pragma once

#include "gdrift/measure.hpp"

#include <string_view>

namespace gdrift {

enum class PointClass { Regular, ReflectingUp, ReflectingDown, Absorbing, NoSolutionIfReached };

std::string_view to_string(PointClass c);

/// Coefficients of c_plus * L+(t,x) = c_minus * L-(t,x).
struct LocalTimeRelation {
    double c_plus;
    double c_minus;
};

struct VanishingLocalTimes {
    bool left_zero;   ///< L-(t,x) = 0 is forced
    bool right_zero;  ///< L+(t,x) = 0 is forced
    friend bool operator==(const VanishingLocalTimes&, const VanishingLocalTimes&) = default;
};

/// Classification of an atom weight alone; `b_at_x` decides absorbing versus
/// no-solution when the atom condition is strictly violated.
PointClass classify_weight(double a, Convention conv, double b_at_x);
PointClass classify_point(const DriftMeasure& nu, Convention conv, double x, double b_at_x);

LocalTimeRelation local_time_relation(double a, Convention conv);
VanishingLocalTimes vanishing_local_times(double a, Convention conv);

/// Image of a single atom weight under the convention change. Throws
/// Error(ConversionUndefined) on the excluded weights; `at` is only used for
/// the error payload.
double convert_atom_weight(double a, Convention from, Convention to, double at = 0.0);

/// Rewrites the drift measure so that the same processes solve the equation
/// under convention `to`. Densities pass through unchanged.
DriftMeasure convert_measure(const DriftMeasure& nu, Convention from, Convention to);

}  // namespace gdrift
