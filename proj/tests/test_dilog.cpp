#include <doctest.h>

#include <cmath>

#include "dilog.hpp"
#include "oracle_helpers.hpp"

using ldcanon::dilog;

namespace {
constexpr double kPi2 = 9.869604401089358618834490999876;
}

TEST_SUITE("dilog") {

TEST_CASE("classical values") {
    CHECK(dilog(0.0) == 0.0);
    CHECK(dilog(1.0) == doctest::Approx(kPi2 / 6.0).epsilon(1e-15));
    CHECK(dilog(-1.0) == doctest::Approx(-kPi2 / 12.0).epsilon(1e-15));
    CHECK(dilog(0.5) ==
          doctest::Approx(kPi2 / 12.0 - 0.5 * std::log(2.0) * std::log(2.0))
              .epsilon(1e-15));
}

TEST_CASE("oracle sanity") {
    CHECK(oracle::dilog_integral(1.0) == doctest::Approx(kPi2 / 6.0).epsilon(1e-10));
    CHECK(oracle::dilog_integral(-1.0) ==
          doctest::Approx(-kPi2 / 12.0).epsilon(1e-10));
}

TEST_CASE("every branch agrees with the defining integral") {
    // covers series, reflection, Landen, both inversions, and the seams
    const double points[] = {-120.0, -5.0,  -1.2, -0.9,  -0.6, -0.35, -0.1,
                             0.05,   0.3,   0.49, 0.52,  0.7,  0.9,   0.985,
                             1.0005, 1.04,  1.5,  2.5,   9.0,  40.0,  3000.0};
    for (double x : points) {
        const double want = oracle::dilog_integral(x);
        CHECK_MESSAGE(dilog(x) == doctest::Approx(want).epsilon(5e-9),
                      "x = ", x);
    }
}

TEST_CASE("inversion identity for large arguments") {
    for (double x : {10.0, 100.0, 1e4, 1e8}) {
        const double lg = std::log(x);
        CHECK(dilog(x) + dilog(1.0 / x) ==
              doctest::Approx(kPi2 / 3.0 - 0.5 * lg * lg).epsilon(1e-13));
    }
}

} // TEST_SUITE
