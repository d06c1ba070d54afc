#include <doctest.h>

#include "extval.hpp"

using lorembed::ExtValue;
using lorembed::ext_pow;

TEST_CASE("degenerate-case arithmetic table") {
    const ExtValue zero(0.0), one(1.0), inf = ExtValue::infinity();
    CHECK((one / inf).is_zero());   // 1/inf = 0
    CHECK((inf / inf).is_zero());   // inf/inf = 0
    CHECK((zero / zero).is_zero()); // 0/0 = 0
    CHECK((zero / inf).is_zero());  // 0/inf = 0
    CHECK((zero * inf).is_zero());  // 0*inf = 0
    CHECK((inf * zero).is_zero());  // inf*0 = 0
    CHECK((one / zero).is_inf());   // 1/0 = inf
}

TEST_CASE("ordinary arithmetic passes through") {
    ExtValue a(3.0), b(4.0);
    CHECK((a + b).value() == doctest::Approx(7.0));
    CHECK((a * b).value() == doctest::Approx(12.0));
    CHECK((a / b).value() == doctest::Approx(0.75));
    CHECK((ExtValue(5.0) / ExtValue(0.0)).is_inf());
    CHECK((ExtValue::infinity() / ExtValue(2.0)).is_inf());
    CHECK((ExtValue(2.0) + ExtValue::infinity()).is_inf());
}

TEST_CASE("cap promotion to infinity") {
    ExtValue big(1e200);
    CHECK((big * big).is_inf());
    CHECK(ExtValue(2e300).is_inf());
    CHECK_FALSE(ExtValue(9e299).is_inf());
}

TEST_CASE("powers on the extended half-line") {
    CHECK(ext_pow(ExtValue(0.0), 2.0).is_zero());
    CHECK(ext_pow(ExtValue(0.0), -1.0).is_inf());
    CHECK(ext_pow(ExtValue(0.0), 0.0).value() == 1.0);
    CHECK(ext_pow(ExtValue::infinity(), 0.5).is_inf());
    CHECK(ext_pow(ExtValue::infinity(), -2.0).is_zero());
    CHECK(ext_pow(ExtValue(2.0), 10.0).value() == doctest::Approx(1024.0));
}

TEST_CASE("NaN and negative inputs are rejected") {
    CHECK_THROWS(ExtValue(std::numeric_limits<double>::quiet_NaN()));
    CHECK_THROWS(ExtValue(-0.5));
    CHECK(ExtValue(-1e-13).is_zero());  // rounding noise tolerated
}
