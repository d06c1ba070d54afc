#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "quadrature.hpp"
#include "weights.hpp"
#include "weights_json.hpp"

using namespace lorembed;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("density evaluation of power pieces") {
    CHECK(WeightSpec::power(1.0, 0.0, 1.0)(0.3) == doctest::Approx(1.0));
    CHECK(WeightSpec::power(1.0, 2.0, 1.0)(0.5) == doctest::Approx(0.25));
    CHECK(WeightSpec::power(2.0, -0.5, kInf)(4.0) == doctest::Approx(1.0));
    CHECK(WeightSpec::end_power(1.0, -1.0, 1.0)(0.75) == doctest::Approx(4.0));
    CHECK(WeightSpec::powerlog(1.0, 0.0, 1.0, 1.0)(std::exp(-1.0)) == doctest::Approx(2.0));
}

TEST_CASE("boundary points use the piece on the right") {
    std::vector<WeightPiece> ps{{0.0, 0.5, Anchor::Zero, 1.0, 0.0, 0.0},
                                {0.5, 1.0, Anchor::Zero, 3.0, 0.0, 0.0}};
    WeightSpec w = WeightSpec::piecewise(ps, 1.0);
    CHECK(w(0.4) == doctest::Approx(1.0));
    CHECK(w(0.5) == doctest::Approx(3.0));
    CHECK(w(0.6) == doctest::Approx(3.0));
}

TEST_CASE("malformed weights are rejected at construction") {
    CHECK_THROWS(WeightSpec::power(-1.0, 0.0, 1.0));
    CHECK_THROWS(WeightSpec::end_power(1.0, -1.0, kInf));
    CHECK_THROWS(WeightSpec::powerlog(1.0, 0.0, 2.0, 10.0));  // log piece past t = e
    std::vector<WeightPiece> gap{{0.0, 0.4, Anchor::Zero, 1.0, 0.0, 0.0},
                                 {0.5, 1.0, Anchor::Zero, 1.0, 0.0, 0.0}};
    CHECK_THROWS(WeightSpec::piecewise(gap, 1.0));
}

TEST_CASE("closed-form primitives of the basic powers") {
    Primitive one = primitive(WeightSpec::power(1.0, 0.0, 1.0));
    CHECK(one.eval(0.7) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(one.closed_form_available());

    Primitive sq = primitive(WeightSpec::power(1.0, 2.0, 1.0));
    for (double t : {0.1, 0.25, 0.5, 0.9})
        CHECK(sq.eval(t) == doctest::Approx(t * t * t / 3.0).epsilon(1e-14));

    // log-singular mass at L shows up in value_at_L, not in interior values
    Primitive logdiv = primitive(WeightSpec::end_power(1.0, -1.0, 1.0));
    CHECK(logdiv.value_at_L().is_inf());
    CHECK(logdiv.eval(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS(logdiv.eval(1.0));
}

TEST_CASE("primitives of log-carrying pieces") {
    // t^{-1} log(e/t)^{-2} integrates to 1/log(e/t)
    Primitive p = primitive(WeightSpec::powerlog(1.0, -1.0, -2.0, 1.0));
    for (double t : {0.05, 0.3, 0.8})
        CHECK(p.eval(t) == doctest::Approx(1.0 / (1.0 - std::log(t))).epsilon(1e-13));
    CHECK(p.value_at_L().value() == doctest::Approx(1.0));

    // t^{1/2} log(e/t): closed form against quadrature
    Primitive q = primitive(WeightSpec::powerlog(1.0, 0.5, 1.0, 1.0));
    CHECK(q.closed_form_available());
    CHECK(q.matches_quadrature(1e-10, 32));
}

TEST_CASE("non-weights are refused") {
    CHECK_THROWS(primitive(WeightSpec::power(1.0, -1.0, 1.0)));
    CHECK_THROWS(primitive(WeightSpec::power(1.0, -1.5, 1.0)));
    // vanishing near zero
    std::vector<WeightPiece> z{{0.0, 0.5, Anchor::Zero, 0.0, 0.0, 0.0},
                               {0.5, 1.0, Anchor::Zero, 1.0, 0.0, 0.0}};
    CHECK_THROWS(primitive(WeightSpec::piecewise(z, 1.0)));
    // custom density asserted non-integrable
    CHECK_THROWS(primitive(WeightSpec::custom([](double t) { return 1.0 / t; }, 1.0, false)));
}

TEST_CASE("primitive monotonicity on random grids") {
    std::vector<WeightPiece> ps{{0.0, 0.3, Anchor::Zero, 2.0, 0.5, 0.0},
                                {0.3, 0.7, Anchor::Zero, 1.0, 0.0, 0.0},
                                {0.7, 1.0, Anchor::End, 3.0, 0.5, 0.0}};
    Primitive P = primitive(WeightSpec::piecewise(ps, 1.0));
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> grid(200);
    for (double& g : grid) g = d(rng);
    std::sort(grid.begin(), grid.end());
    double prev = 0.0;
    for (double t : grid) {
        double cur = P.eval(t);
        CHECK(cur >= prev);
        prev = cur;
    }
    // between() agrees with differences of eval()
    CHECK(P.between(0.2, 0.9) ==
          doctest::Approx(P.eval(0.9) - P.eval(0.2)).epsilon(1e-12));
    CHECK(P.matches_quadrature(1e-10, 32));
}

TEST_CASE("rescaling a weight rescales its primitive exactly") {
    std::vector<WeightPiece> base{{0.0, 0.5, Anchor::Zero, 1.0, 1.0, 0.0},
                                  {0.5, 1.0, Anchor::Zero, 0.25, -0.5, 0.0}};
    std::vector<WeightPiece> scaled = base;
    for (auto& p : scaled) p.c *= 4.0;
    Primitive P = primitive(WeightSpec::piecewise(base, 1.0));
    Primitive Q = primitive(WeightSpec::piecewise(scaled, 1.0));
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.999})
        CHECK(Q.eval(t) == 4.0 * P.eval(t));  // exact: power-of-two scaling
}

TEST_CASE("custom densities integrate with and without a closed-form hint") {
    auto dens = [](double t) { return 3.0 * t * t; };
    Primitive with_hint = primitive(
        WeightSpec::custom(dens, 1.0, true, [](double t) { return t * t * t; }));
    CHECK(with_hint.closed_form_available());
    CHECK(with_hint.eval(0.6) == doctest::Approx(0.216).epsilon(1e-14));

    Primitive no_hint = primitive(WeightSpec::custom(dens, 1.0, true));
    CHECK_FALSE(no_hint.closed_form_available());
    CHECK(no_hint.eval(0.6) == doctest::Approx(0.216).epsilon(1e-9));
    CHECK(no_hint.value_at_L().value() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tail integrals of pure powers use the closed form") {
    Primitive U = primitive(WeightSpec::power(1.0, 0.0, 1.0));
    WeightSpec v = WeightSpec::power(1.0, 0.0, 1.0);
    // int_{1/2}^1 s^{-2} ds = 1
    CHECK(tail_integral(v, U, 2.0, 0.5).value() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tail_integral(v, U, 2.0, 1.0).is_zero());

    Primitive Uinf = primitive(WeightSpec::power(1.0, 0.0, kInf));
    WeightSpec vinf = WeightSpec::power(1.0, 0.0, kInf);
    CHECK(tail_integral(vinf, Uinf, 1.0, 2.0).is_inf());  // int^inf 1/s
    CHECK(tail_integral(vinf, Uinf, 3.0, 2.0).value() ==
          doctest::Approx(1.0 / 8.0).epsilon(1e-14));  // int_2^inf s^{-3} = 1/8
}

TEST_CASE("divergent upper weight forces an infinite tail") {
    Primitive U = primitive(WeightSpec::power(1.0, 0.0, 1.0));
    WeightSpec v = WeightSpec::end_power(1.0, -1.0, 1.0);
    CHECK(tail_integral(v, U, 1.0, 0.25).is_inf());
    CHECK(tail_integral(v, U, 1.0, 0.9).is_inf());
}

TEST_CASE("tail integral is nonincreasing in the cut point") {
    Primitive U = primitive(WeightSpec::power(1.0, 1.0, 1.0));
    WeightSpec v = WeightSpec::powerlog(1.0, 0.0, 1.0, 1.0);
    double prev = kInf;
    for (double t : {0.2, 0.4, 0.6, 0.8}) {
        double cur = tail_integral(v, U, 1.5, t).value();
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("admissibility of the top weight") {
    CHECK(is_admissible(primitive(WeightSpec::power(1.0, 0.0, 1.0))));
    CHECK(is_admissible(primitive(WeightSpec::power(1.0, -0.5, 1.0))));
    std::vector<WeightPiece> flat{{0.0, 0.2, Anchor::Zero, 1.0, 0.0, 0.0},
                                  {0.2, 0.4, Anchor::Zero, 0.0, 0.0, 0.0},
                                  {0.4, 1.0, Anchor::Zero, 1.0, 0.0, 0.0}};
    CHECK_FALSE(is_admissible(primitive(WeightSpec::piecewise(flat, 1.0))));
    CHECK(is_admissible(primitive(
        WeightSpec::custom([](double t) { return t * t; }, 1.0, true))));
}

TEST_CASE("exponent shift for reduced higher-order inequalities") {
    auto [p1, q1] = sobolev_exponents(2.0, 2.0, 1, 3, 1.0);
    CHECK(p1 == doctest::Approx(1.0));
    CHECK(q1 == doctest::Approx(1.0));
    auto [p2, q2] = sobolev_exponents(4.0, 2.0, 2, 5, 1.0);
    CHECK(p2 == doctest::Approx(2.0));
    CHECK(q2 == doctest::Approx(1.0));
    CHECK_THROWS(sobolev_exponents(2.0, 2.0, 1, 3, 0.0));
    CHECK_THROWS(sobolev_exponents(2.0, 2.0, 1, 3, 2.0));
    CHECK_THROWS(sobolev_exponents(2.0, 2.0, 3, 3, 0.5));
}

TEST_CASE("weight JSON round-trips") {
    auto j = nlohmann::json::parse(R"({"type":"power","c":2.0,"alpha":-0.5})");
    WeightSpec w = weight_from_json(j, 1.0);
    CHECK(w(0.25) == doctest::Approx(4.0));
    CHECK(weight_to_json(w) == j);

    auto pj = nlohmann::json::parse(R"({
        "type":"piecewise","breaks":[0.5],
        "pieces":[{"type":"power","c":1.0,"alpha":0.0},
                  {"type":"endpower","c":1.0,"alpha":-1.0}]})");
    WeightSpec pw = weight_from_json(pj, 1.0);
    CHECK(pw(0.25) == doctest::Approx(1.0));
    CHECK(pw(0.75) == doctest::Approx(4.0));
    nlohmann::json back = weight_to_json(pw);
    CHECK(back["type"] == "piecewise");
    CHECK(back["breaks"][0] == doctest::Approx(0.5));

    CHECK_THROWS(weight_from_json(nlohmann::json::parse(R"({"type":"spline"})"), 1.0));
}
