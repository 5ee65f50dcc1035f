#include "gdrift/measure.hpp"

#include "gdrift/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace gdrift {

std::string_view to_string(Convention c) {
    switch (c) {
    case Convention::Right: return "right";
    case Convention::Left: return "left";
    case Convention::Symmetric: return "symmetric";
    }
    return "?";
}

Convention parse_convention(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "right") return Convention::Right;
    if (lower == "left") return Convention::Left;
    if (lower == "symmetric" || lower == "sym") return Convention::Symmetric;
    throw Error(ErrorKind::ConfigError, "unknown convention '" + std::string(name) + "'");
}

DriftMeasure::DriftMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> density) {
    for (const auto& a : atoms) {
        if (!std::isfinite(a.at) || !std::isfinite(a.weight)) {
            throw Error(ErrorKind::InvalidMeasure, "atom with non-finite location or weight");
        }
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& l, const Atom& r) { return l.at < r.at; });
    for (const auto& a : atoms) {
        if (!atoms_.empty() && atoms_.back().at == a.at) {
            atoms_.back().weight += a.weight;
        } else {
            atoms_.push_back(a);
        }
    }
    std::erase_if(atoms_, [](const Atom& a) { return a.weight == 0.0; });

    for (const auto& p : density) {
        if (!std::isfinite(p.from) || !std::isfinite(p.to) || !std::isfinite(p.value)) {
            throw Error(ErrorKind::InvalidMeasure, "density piece with non-finite field");
        }
        if (p.from > p.to) {
            throw Error(ErrorKind::InvalidMeasure, "density piece with from > to");
        }
    }
    std::erase_if(density, [](const DensityPiece& p) { return p.from == p.to || p.value == 0.0; });
    std::sort(density.begin(), density.end(),
              [](const DensityPiece& l, const DensityPiece& r) { return l.from < r.from; });
    for (const auto& p : density) {
        if (!density_.empty()) {
            auto& last = density_.back();
            if (p.from < last.to) {
                throw Error(ErrorKind::InvalidMeasure, "overlapping density pieces");
            }
            if (p.from == last.to && p.value == last.value) {
                last.to = p.to;
                continue;
            }
        }
        density_.push_back(p);
    }
}

double DriftMeasure::atom_weight(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v) { return a.at < v; });
    return (it != atoms_.end() && it->at == x) ? it->weight : 0.0;
}

double DriftMeasure::density_at(double x) const {
    auto it = std::upper_bound(density_.begin(), density_.end(), x,
                               [](double v, const DensityPiece& p) { return v < p.from; });
    if (it == density_.begin()) return 0.0;
    --it;
    return x < it->to ? it->value : 0.0;
}

double DriftMeasure::interval_mass(double a, double b, IntervalKind kind) const {
    if (!(a <= b)) {
        throw Error(ErrorKind::InvalidInterval, "interval with a > b");
    }
    const bool left_closed = kind == IntervalKind::Closed || kind == IntervalKind::ClosedOpen;
    const bool right_closed = kind == IntervalKind::Closed || kind == IntervalKind::OpenClosed;

    double mass = 0.0;
    for (const auto& atom : atoms_) {
        const bool above = left_closed ? atom.at >= a : atom.at > a;
        const bool below = right_closed ? atom.at <= b : atom.at < b;
        if (above && below) mass += atom.weight;
    }
    for (const auto& p : density_) {
        const double lo = std::max(a, p.from);
        const double hi = std::min(b, p.to);
        if (hi > lo) mass += p.value * (hi - lo);
    }
    return mass;
}

DriftMeasure DriftMeasure::shift(double x0) const {
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) atoms.push_back({a.at - x0, a.weight});
    std::vector<DensityPiece> density;
    density.reserve(density_.size());
    for (const auto& p : density_) density.push_back({p.from - x0, p.to - x0, p.value});
    return DriftMeasure(std::move(atoms), std::move(density));
}

DriftMeasure DriftMeasure::negate_reflect() const {
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) atoms.push_back({-a.at, -a.weight});
    // (-r, -l] is stored as [-r, -l); the endpoint has zero density mass.
    std::vector<DensityPiece> density;
    density.reserve(density_.size());
    for (const auto& p : density_) density.push_back({-p.to, -p.from, -p.value});
    return DriftMeasure(std::move(atoms), std::move(density));
}

DriftMeasure DriftMeasure::restrict_open(double lo, double hi) const {
    std::vector<Atom> atoms;
    for (const auto& a : atoms_) {
        if (a.at > lo && a.at < hi) atoms.push_back(a);
    }
    std::vector<DensityPiece> density;
    for (const auto& p : density_) {
        const double l = std::max(p.from, lo);
        const double r = std::min(p.to, hi);
        if (r > l) density.push_back({l, r, p.value});
    }
    return DriftMeasure(std::move(atoms), std::move(density));
}

double atom_weight(const DriftMeasure& nu, double x) { return nu.atom_weight(x); }
double interval_mass(const DriftMeasure& nu, double a, double b, IntervalKind kind) {
    return nu.interval_mass(a, b, kind);
}
DriftMeasure shift(const DriftMeasure& nu, double x0) { return nu.shift(x0); }
DriftMeasure negate_reflect(const DriftMeasure& nu) { return nu.negate_reflect(); }

}  // namespace gdrift
