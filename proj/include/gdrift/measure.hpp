#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace gdrift {

/// Which local time drives the generalized drift term.
enum class Convention { Right, Left, Symmetric };

std::string_view to_string(Convention c);
/// Accepts "right", "left", "symmetric" (case-insensitive). Throws Error(ConfigError) otherwise.
Convention parse_convention(std::string_view name);

struct Atom {
    double at;
    double weight;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Constant density `value` on the half-open interval [from, to).
struct DensityPiece {
    double from;
    double to;
    double value;
    friend bool operator==(const DensityPiece&, const DensityPiece&) = default;
};

enum class IntervalKind { Closed, ClosedOpen, OpenClosed, Open };

/// Finite signed measure: finitely many atoms plus a piecewise-constant density
/// with compact support.
///
/// Construction normalizes the input: atoms are sorted, coincident locations are
/// merged by summing their weights and zero weights are dropped. Density pieces
/// are sorted, empty or zero-valued pieces are dropped and touching pieces with
/// equal value are merged. Overlapping density pieces are rejected.
class DriftMeasure {
public:
    DriftMeasure() = default;
    DriftMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> density);

    static DriftMeasure zero() { return {}; }
    static DriftMeasure dirac(double at, double weight) { return DriftMeasure({{at, weight}}, {}); }

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::span<const DensityPiece> density() const noexcept { return density_; }
    bool empty() const noexcept { return atoms_.empty() && density_.empty(); }

    /// nu({x}); exact comparison against stored atom locations.
    double atom_weight(double x) const;
    /// Density value at x (0 outside the listed pieces).
    double density_at(double x) const;
    /// Total mass of the interval with endpoint inclusion given by `kind`.
    /// Throws Error(InvalidInterval) when a > b.
    double interval_mass(double a, double b, IntervalKind kind) const;

    /// nu_{x0}(B) = nu(B + x0).
    DriftMeasure shift(double x0) const;
    /// B -> -nu(-B).
    DriftMeasure negate_reflect() const;
    /// Restriction to the open interval (lo, hi); infinite bounds allowed.
    DriftMeasure restrict_open(double lo, double hi) const;

    friend bool operator==(const DriftMeasure&, const DriftMeasure&) = default;

private:
    std::vector<Atom> atoms_;
    std::vector<DensityPiece> density_;
};

double atom_weight(const DriftMeasure& nu, double x);
double interval_mass(const DriftMeasure& nu, double a, double b, IntervalKind kind);
DriftMeasure shift(const DriftMeasure& nu, double x0);
DriftMeasure negate_reflect(const DriftMeasure& nu);

}  // namespace gdrift
