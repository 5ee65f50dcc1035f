#include "gdrift/classify.hpp"

#include "gdrift/error.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace gdrift {

std::string_view to_string(PointClass c) {
    switch (c) {
    case PointClass::Regular: return "Regular";
    case PointClass::ReflectingUp: return "ReflectingUp";
    case PointClass::ReflectingDown: return "ReflectingDown";
    case PointClass::Absorbing: return "Absorbing";
    case PointClass::NoSolutionIfReached: return "NoSolutionIfReached";
    }
    return "?";
}

PointClass classify_weight(double a, Convention conv, double b_at_x) {
    const PointClass violated = b_at_x == 0.0 ? PointClass::Absorbing : PointClass::NoSolutionIfReached;
    switch (conv) {
    case Convention::Right:
        if (a < 0.5) return PointClass::Regular;
        if (a == 0.5) return PointClass::ReflectingUp;
        return violated;
    case Convention::Left:
        if (a > -0.5) return PointClass::Regular;
        if (a == -0.5) return PointClass::ReflectingDown;
        return violated;
    case Convention::Symmetric:
        if (std::abs(a) < 1.0) return PointClass::Regular;
        if (a == 1.0) return PointClass::ReflectingUp;
        if (a == -1.0) return PointClass::ReflectingDown;
        return violated;
    }
    return PointClass::Regular;
}

PointClass classify_point(const DriftMeasure& nu, Convention conv, double x, double b_at_x) {
    return classify_weight(nu.atom_weight(x), conv, b_at_x);
}

LocalTimeRelation local_time_relation(double a, Convention conv) {
    switch (conv) {
    case Convention::Right: return {1.0 - 2.0 * a, 1.0};
    case Convention::Left: return {1.0, 1.0 + 2.0 * a};
    case Convention::Symmetric: return {1.0 - a, 1.0 + a};
    }
    return {1.0, 1.0};
}

VanishingLocalTimes vanishing_local_times(double a, Convention conv) {
    switch (conv) {
    case Convention::Right: return {a >= 0.5, a > 0.5};
    case Convention::Left: return {a < -0.5, a <= -0.5};
    case Convention::Symmetric: {
        const bool strict = std::abs(a) > 1.0;
        return {strict || a == 1.0, strict || a == -1.0};
    }
    }
    return {false, false};
}

namespace {

[[noreturn]] void undefined(double at, double a, Convention from, Convention to) {
    std::ostringstream msg;
    msg << "atom at " << at << " with weight " << a << " has no image under "
        << to_string(from) << " -> " << to_string(to);
    throw Error(ErrorKind::ConversionUndefined, msg.str(), at, a);
}

}  // namespace

double convert_atom_weight(double a, Convention from, Convention to, double at) {
    if (from == to) return a;
    using C = Convention;
    if (from == C::Right && to == C::Symmetric) {
        return a < 1.0 ? 2.0 * a / (2.0 - 2.0 * a) : 2.0 * a;
    }
    if (from == C::Symmetric && to == C::Right) {
        if (a > -1.0) return a / (1.0 + a);
        if (a < -1.0) return -a / 2.0;
        undefined(at, a, from, to);
    }
    if (from == C::Right && to == C::Left) {
        if (a < 0.5) return a / (1.0 - 2.0 * a);
        if (a > 0.5) return -a;
        undefined(at, a, from, to);
    }
    if (from == C::Left && to == C::Right) {
        if (a > -0.5) return a / (1.0 + 2.0 * a);
        // Inverse of the a -> -a branch above.
        if (a < -0.5) return -a;
        undefined(at, a, from, to);
    }
    if (from == C::Left && to == C::Symmetric) {
        return a > -1.0 ? 2.0 * a / (2.0 + 2.0 * a) : 2.0 * a;
    }
    // Symmetric -> Left
    if (a < 1.0) return a / (1.0 - a);
    if (a > 1.0) return -a / 2.0;
    undefined(at, a, from, to);
}

DriftMeasure convert_measure(const DriftMeasure& nu, Convention from, Convention to) {
    std::vector<Atom> atoms;
    atoms.reserve(nu.atoms().size());
    for (const auto& atom : nu.atoms()) {
        atoms.push_back({atom.at, convert_atom_weight(atom.weight, from, to, atom.at)});
    }
    return DriftMeasure(std::move(atoms), {nu.density().begin(), nu.density().end()});
}

}  // namespace gdrift
