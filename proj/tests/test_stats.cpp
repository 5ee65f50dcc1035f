#include "gdrift/rng.hpp"
#include "gdrift/stats.hpp"

#include "support.hpp"

#include <vector>

using namespace gdrift;

TEST_CASE("moments") {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    const auto m = stats::moments(xs);
    CHECK(m.count == 4);
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.variance == doctest::Approx(5.0 / 3.0));
    CHECK(m.stderr_mean == doctest::Approx(std::sqrt(5.0 / 12.0)));
    CHECK(stats::moments({}).count == 0);
    const std::vector<double> one = {3.0};
    CHECK(stats::moments(one).variance == 0.0);
}

TEST_CASE("kolmogorov_tail reference values") {
    CHECK(stats::kolmogorov_tail(0.0) == 1.0);
    CHECK(stats::kolmogorov_tail(1.0) == doctest::Approx(0.2699996).epsilon(1e-6));
    CHECK(stats::kolmogorov_tail(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(stats::kolmogorov_tail(3.0) < 1e-7);
}

TEST_CASE("ks_critical_value") {
    CHECK(stats::ks_critical_value(0.05, 100, 100) == doctest::Approx(1.3581 * std::sqrt(0.02)).epsilon(1e-4));
}

TEST_CASE("two-sample KS") {
    RngStream rng(1, 0);
    std::vector<double> a, b, shifted;
    for (int i = 0; i < 4000; ++i) {
        a.push_back(rng.normal());
        b.push_back(rng.normal());
        shifted.push_back(rng.normal() + 0.3);
    }
    const auto same = stats::ks_two_sample(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);
    CHECK(stats::ks_two_sample(a, b).p_value > 1e-3);
    CHECK(stats::ks_two_sample(a, shifted).p_value < 1e-10);

    const auto exact = stats::ks_two_sample({1.0, 2.0, 3.0, 4.0}, {3.5, 5.0});
    CHECK(exact.statistic == doctest::Approx(0.75));
    CHECK_THROWS_KIND(stats::ks_two_sample({}, {1.0}), ErrorKind::InvalidParameter);
}
