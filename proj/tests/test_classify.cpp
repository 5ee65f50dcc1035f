#include "gdrift/classify.hpp"

#include "support.hpp"

#include <random>

using namespace gdrift;

namespace {

constexpr Convention kConventions[] = {Convention::Right, Convention::Left, Convention::Symmetric};

bool is_excluded(double a, Convention from, Convention to) {
    if (from == Convention::Symmetric && to == Convention::Right) return a == -1.0;
    if (from == Convention::Right && to == Convention::Left) return a == 0.5;
    if (from == Convention::Left && to == Convention::Right) return a == -0.5;
    if (from == Convention::Symmetric && to == Convention::Left) return a == 1.0;
    return false;
}

/// Weights on which the forward map is followed by its own inverse branch.
bool round_trip_is_identity(double a, Convention from, Convention to) {
    if (from == Convention::Right && to == Convention::Symmetric) return a < 1.0;
    if (from == Convention::Symmetric && to == Convention::Right) return a > -1.0;
    if (from == Convention::Left && to == Convention::Symmetric) return a > -1.0;
    if (from == Convention::Symmetric && to == Convention::Left) return a < 1.0;
    return true;
}

}  // namespace

TEST_CASE("classify_point examples") {
    CHECK(classify_point(DriftMeasure::dirac(0.0, 0.6), Convention::Right, 0.0, 1.0) == PointClass::NoSolutionIfReached);
    CHECK(classify_point(DriftMeasure::dirac(0.0, -1.0), Convention::Symmetric, 0.0, 0.0) == PointClass::ReflectingDown);
    CHECK(classify_point(DriftMeasure::dirac(0.0, -1.0), Convention::Symmetric, 0.0, 3.0) == PointClass::ReflectingDown);
    CHECK(classify_point(DriftMeasure::zero(), Convention::Right, 0.0, 0.0) == PointClass::Regular);
    CHECK(classify_point(DriftMeasure::dirac(1.0, 0.9), Convention::Right, 0.0, 1.0) == PointClass::Regular);
}

TEST_CASE("classification boundaries per convention") {
    CHECK(classify_weight(0.49, Convention::Right, 1.0) == PointClass::Regular);
    CHECK(classify_weight(-7.0, Convention::Right, 1.0) == PointClass::Regular);
    CHECK(classify_weight(0.5, Convention::Right, 0.0) == PointClass::ReflectingUp);
    CHECK(classify_weight(0.51, Convention::Right, 0.0) == PointClass::Absorbing);
    CHECK(classify_weight(0.51, Convention::Right, -2.0) == PointClass::NoSolutionIfReached);

    CHECK(classify_weight(-0.49, Convention::Left, 1.0) == PointClass::Regular);
    CHECK(classify_weight(7.0, Convention::Left, 1.0) == PointClass::Regular);
    CHECK(classify_weight(-0.5, Convention::Left, 1.0) == PointClass::ReflectingDown);
    CHECK(classify_weight(-0.51, Convention::Left, 0.0) == PointClass::Absorbing);
    CHECK(classify_weight(-0.51, Convention::Left, 1.0) == PointClass::NoSolutionIfReached);

    CHECK(classify_weight(0.99, Convention::Symmetric, 1.0) == PointClass::Regular);
    CHECK(classify_weight(1.0, Convention::Symmetric, 1.0) == PointClass::ReflectingUp);
    CHECK(classify_weight(-1.0, Convention::Symmetric, 1.0) == PointClass::ReflectingDown);
    CHECK(classify_weight(-1.5, Convention::Symmetric, 0.0) == PointClass::Absorbing);
    CHECK(classify_weight(1.5, Convention::Symmetric, 0.5) == PointClass::NoSolutionIfReached);
}

TEST_CASE("local_time_relation examples") {
    auto r = local_time_relation(0.0, Convention::Symmetric);
    CHECK(r.c_plus == 1.0);
    CHECK(r.c_minus == 1.0);
    r = local_time_relation(0.5, Convention::Right);
    CHECK(r.c_plus == 0.0);
    CHECK(r.c_minus == 1.0);
    r = local_time_relation(0.5, Convention::Symmetric);
    CHECK(r.c_plus == 0.5);
    CHECK(r.c_minus == 1.5);
    r = local_time_relation(0.25, Convention::Left);
    CHECK(r.c_plus == 1.0);
    CHECK(r.c_minus == 1.5);
}

TEST_CASE("vanishing_local_times examples") {
    CHECK(vanishing_local_times(0.5, Convention::Right) == VanishingLocalTimes{true, false});
    CHECK(vanishing_local_times(0.6, Convention::Right) == VanishingLocalTimes{true, true});
    CHECK(vanishing_local_times(2.0, Convention::Symmetric) == VanishingLocalTimes{true, true});
    CHECK(vanishing_local_times(1.0, Convention::Symmetric) == VanishingLocalTimes{true, false});
    CHECK(vanishing_local_times(-1.0, Convention::Symmetric) == VanishingLocalTimes{false, true});
    CHECK(vanishing_local_times(0.0, Convention::Left) == VanishingLocalTimes{false, false});
    CHECK(vanishing_local_times(-0.5, Convention::Left) == VanishingLocalTimes{false, true});
    CHECK(vanishing_local_times(-0.6, Convention::Left) == VanishingLocalTimes{true, true});
}

TEST_CASE("vanishing flags agree with zero relation coefficients") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> weights = {-1.0, -0.5, 0.0, 0.5, 1.0};
    for (int i = 0; i < 1000; ++i) weights.push_back(u(gen));
    for (auto conv : kConventions) {
        for (double a : weights) {
            const auto rel = local_time_relation(a, conv);
            const auto zero = vanishing_local_times(a, conv);
            CHECK((rel.c_plus != 0.0 || rel.c_minus != 0.0));
            if (rel.c_plus == 0.0) CHECK(zero.left_zero);
            if (rel.c_minus == 0.0) CHECK(zero.right_zero);
        }
    }
}

TEST_CASE("convert_measure examples") {
    const auto sym = convert_measure(DriftMeasure::dirac(0.0, 0.25), Convention::Right, Convention::Symmetric);
    CHECK(sym.atom_weight(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const auto right = convert_measure(DriftMeasure::dirac(0.0, 1.0 / 3.0), Convention::Symmetric, Convention::Right);
    CHECK(right.atom_weight(0.0) == doctest::Approx(0.25).epsilon(1e-15));
    const auto back = convert_measure(right, Convention::Right, Convention::Symmetric);
    CHECK(back.atom_weight(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    CHECK(convert_atom_weight(0.25, Convention::Right, Convention::Left) == doctest::Approx(0.5));
    CHECK(convert_atom_weight(0.75, Convention::Right, Convention::Left) == -0.75);
    CHECK(convert_atom_weight(-0.75, Convention::Left, Convention::Right) == 0.75);
    CHECK(convert_atom_weight(1.0, Convention::Right, Convention::Symmetric) == 2.0);
    CHECK(convert_atom_weight(-1.0, Convention::Left, Convention::Symmetric) == -2.0);
    CHECK(convert_atom_weight(-3.0, Convention::Symmetric, Convention::Right) == 1.5);
    CHECK(convert_atom_weight(3.0, Convention::Symmetric, Convention::Left) == -1.5);
    for (auto conv : kConventions) CHECK(convert_atom_weight(0.3, conv, conv) == 0.3);
}

TEST_CASE("excluded weights raise ConversionUndefined") {
    try {
        convert_measure(DriftMeasure::dirac(2.0, -1.0), Convention::Symmetric, Convention::Right);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConversionUndefined);
        CHECK(e.location() == 2.0);
        CHECK(e.weight() == -1.0);
    }
    CHECK_THROWS_KIND(convert_atom_weight(0.5, Convention::Right, Convention::Left), ErrorKind::ConversionUndefined);
    CHECK_THROWS_KIND(convert_atom_weight(-0.5, Convention::Left, Convention::Right), ErrorKind::ConversionUndefined);
    CHECK_THROWS_KIND(convert_atom_weight(1.0, Convention::Symmetric, Convention::Left), ErrorKind::ConversionUndefined);
}

TEST_CASE("densities pass through conversions unchanged") {
    const DriftMeasure nu({{0.0, 0.2}}, {{-1.0, 0.5, 0.7}, {1.0, 2.0, -0.3}});
    for (auto from : kConventions) {
        for (auto to : kConventions) {
            const auto out = convert_measure(nu, from, to);
            CHECK(std::equal(out.density().begin(), out.density().end(), nu.density().begin(), nu.density().end()));
        }
    }
}

TEST_CASE("round trips and class invariance on random weights") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (auto from : kConventions) {
        for (auto to : kConventions) {
            if (from == to) continue;
            int identity_checked = 0;
            for (int i = 0; i < 1000; ++i) {
                const double a = u(gen);
                if (is_excluded(a, from, to)) continue;
                const double converted = convert_atom_weight(a, from, to);
                CHECK(classify_weight(converted, to, 1.0) == classify_weight(a, from, 1.0));
                CHECK(classify_weight(converted, to, 0.0) == classify_weight(a, from, 0.0));
                if (!round_trip_is_identity(a, from, to)) continue;
                ++identity_checked;
                CHECK(std::abs(convert_atom_weight(converted, to, from) - a) <= 1e-12 * std::max(1.0, std::abs(a)));
            }
            CHECK(identity_checked > 300);
        }
    }
}

TEST_CASE("boundary weights keep their class under conversion") {
    CHECK(convert_atom_weight(0.5, Convention::Right, Convention::Symmetric) == 1.0);
    CHECK(convert_atom_weight(1.0, Convention::Symmetric, Convention::Right) == 0.5);
    CHECK(convert_atom_weight(-0.5, Convention::Left, Convention::Symmetric) == -1.0);
    CHECK(convert_atom_weight(-1.0, Convention::Symmetric, Convention::Left) == -0.5);
}
