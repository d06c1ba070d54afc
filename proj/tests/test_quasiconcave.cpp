#include <cmath>
#include <limits>

#include "doctest.h"
#include "quasiconcave.hpp"

using namespace lorembed;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("quasiconcavity check accepts and rejects correctly") {
    auto grid = make_log_grid(1.0, 120);
    QcCheck ok = is_quasiconcave([](double t) { return std::sqrt(t); },
                                 [](double t) { return t; }, grid);
    CHECK(ok.ok);
    CHECK(ok.worst == 0.0);

    // h/rho = t increases: not quasiconcave
    QcCheck bad = is_quasiconcave([](double t) { return t * t; },
                                  [](double t) { return t; }, grid);
    CHECK_FALSE(bad.ok);
    CHECK(bad.worst > 0.1);

    // decreasing h
    QcCheck dec = is_quasiconcave([](double t) { return 1.0 - 0.9 * t; },
                                  [](double t) { return t; }, grid);
    CHECK_FALSE(dec.ok);
}

TEST_CASE("square root against identity gives the exact factor-4 ladder") {
    auto h = [](double t) { return std::sqrt(t); };
    auto rho = [](double t) { return t; };
    CoveringSequence cs = build_covering_sequence(h, rho, 2.0, 1.0, kInf, 5);

    CHECK_FALSE(cs.left_terminates);
    CHECK_FALSE(cs.right_terminates);
    CHECK(cs.truncated_left);
    CHECK(cs.truncated_right);
    CHECK(cs.k_lo == -5);
    CHECK(cs.k_hi == 5);
    REQUIRE(cs.points.size() == 11);
    for (int i = 0; i < 11; ++i) {
        double expect = std::pow(4.0, i - 5);
        CHECK(cs.points[i] == doctest::Approx(expect).epsilon(1e-9));
    }
    REQUIRE(cs.z_class.size() == 10);
    for (ZClass z : cs.z_class) CHECK(z == ZClass::HComparable);

    CoveringReport rep = verify_covering_sequence(cs);
    CHECK(rep.monotone.pass);
    CHECK(rep.growth.pass);
    CHECK(rep.comparability.pass);
    CHECK(rep.endpoints.pass);
    CHECK(rep.z_consistency.pass);
    CHECK(rep.all_pass());
}

TEST_CASE("plateau function terminates at both sentinels") {
    auto h = [](double t) { return std::min(1.0, t); };
    auto rho = [](double t) { return t; };
    CoveringSequence cs = build_covering_sequence(h, rho, 2.0, 1.0, kInf);

    CHECK(cs.left_terminates);
    CHECK(cs.right_terminates);
    CHECK_FALSE(cs.truncated_left);
    CHECK_FALSE(cs.truncated_right);
    REQUIRE(cs.points.size() == 3);
    CHECK(cs.points[0] == 0.0);
    CHECK(cs.points[1] == 1.0);
    CHECK(std::isinf(cs.points[2]));
    CHECK(cs.k_lo == -1);
    CHECK(cs.k_hi == 1);
    REQUIRE(cs.z_class.size() == 2);
    CHECK(cs.z_class[0] == ZClass::RatioComparable);  // rho/h == 1 on (0,1]
    CHECK(cs.z_class[1] == ZClass::HComparable);      // h == 1 beyond 1

    CoveringReport rep = verify_covering_sequence(cs);
    CHECK(rep.all_pass());
}

TEST_CASE("constant function collapses to the two-point sequence") {
    auto h = [](double) { return 3.0; };
    auto rho = [](double t) { return t; };
    CoveringSequence cs = build_covering_sequence(h, rho, 2.0, 0.5, 1.0);

    REQUIRE(cs.points.size() == 2);
    CHECK(cs.points[0] == 0.0);
    CHECK(cs.points[1] == 1.0);
    CHECK(cs.k_lo == -1);
    CHECK(cs.k_hi == 0);
    REQUIRE(cs.z_class.size() == 1);
    CHECK(cs.z_class[0] == ZClass::HComparable);
    CHECK(verify_covering_sequence(cs).all_pass());
}

TEST_CASE("verifier rejects corrupted sequences") {
    auto h = [](double t) { return std::sqrt(t); };
    auto rho = [](double t) { return t; };
    CoveringSequence cs = build_covering_sequence(h, rho, 2.0, 1.0, kInf, 3);
    REQUIRE(cs.points.size() == 7);
    REQUIRE(verify_covering_sequence(cs).all_pass());

    SUBCASE("missing interior point breaks comparability") {
        CoveringSequence cut = cs;
        cut.points.erase(cut.points.begin() + 3);  // drop x = 1
        cut.z_class.erase(cut.z_class.begin() + 3);
        CoveringReport rep = verify_covering_sequence(cut);
        CHECK_FALSE(rep.comparability.pass);
        CHECK_FALSE(rep.all_pass());
    }

    SUBCASE("reordered points break monotonicity") {
        CoveringSequence swapped = cs;
        std::swap(swapped.points[1], swapped.points[2]);
        CoveringReport rep = verify_covering_sequence(swapped);
        CHECK_FALSE(rep.monotone.pass);
        CHECK_FALSE(rep.all_pass());
    }

    SUBCASE("false termination claim is caught") {
        auto hc = [](double) { return 3.0; };
        CoveringSequence two = build_covering_sequence(hc, rho, 2.0, 0.5, 1.0);
        two.left_terminates = false;  // claims an infinite tail it does not have
        CoveringReport rep = verify_covering_sequence(two);
        CHECK_FALSE(rep.endpoints.pass);
        CHECK_FALSE(rep.all_pass());
    }
}

TEST_CASE("degenerate inputs are refused") {
    auto rho = [](double t) { return t; };
    CHECK_THROWS_WITH_AS(
        build_covering_sequence([](double) { return 0.0; }, rho, 2.0, 0.5, 1.0),
        "zero function", std::domain_error);
    CHECK_THROWS_AS(
        build_covering_sequence([](double t) { return t; }, rho, 1.0, 0.5, 1.0),
        std::invalid_argument);
    CHECK_THROWS_AS(
        build_covering_sequence([](double t) { return t; }, rho, 2.0, 2.0, 1.0),
        std::invalid_argument);
}

TEST_CASE("atom representation reproduces the plateau exactly") {
    auto h = [](double t) { return std::min(1.0, t); };
    auto rho = [](double t) { return t; };
    RepMeasure rep;
    rep.alpha = ExtValue(0.0);
    rep.beta = ExtValue(0.0);
    rep.atoms = {{1.0, 1.0}};
    rep.C1 = 1.0;
    rep.C2 = 1.0;

    ExtValue at_half = represented_function(rep, rho, kInf, 0.5);
    CHECK(at_half.value() == doctest::Approx(0.5).epsilon(1e-14));
    ExtValue at_three = represented_function(rep, rho, kInf, 3.0);
    CHECK(at_three.value() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(verify_representation(h, rho, rep, kInf, make_log_grid(kInf, 100)) < 1e-12);
}

TEST_CASE("density representation reproduces the parabola") {
    // measure density 1/s^2 against rho = t^2 on (0,1) integrates to 2t - t^2
    auto h = [](double t) { return 2.0 * t - t * t; };
    auto rho = [](double t) { return t * t; };
    RepMeasure rep;
    rep.density = [](double s) { return 1.0 / (s * s); };
    rep.C1 = 1.0;
    rep.C2 = 1.0;

    ExtValue at_half = represented_function(rep, rho, 1.0, 0.5);
    CHECK(at_half.value() == doctest::Approx(0.75).epsilon(1e-7));
    CHECK(verify_representation(h, rho, rep, 1.0, make_log_grid(1.0, 60)) < 1e-6);
}

TEST_CASE("identity and constant limit terms") {
    auto rho = [](double t) { return t; };
    RepMeasure lin;  // R(t) = rho(t)
    lin.beta = ExtValue(1.0);
    CHECK(represented_function(lin, rho, 1.0, 0.3).value() == doctest::Approx(0.3));
    CHECK(verify_representation([](double t) { return t; }, rho, lin, 1.0,
                                make_log_grid(1.0, 60)) == 0.0);

    RepMeasure flat;  // R(t) = 1
    flat.alpha = ExtValue(1.0);
    CHECK(verify_representation([](double) { return 1.0; }, rho, flat, 1.0,
                                make_log_grid(1.0, 60)) == 0.0);
}

TEST_CASE("sandwich violations are measured relatively") {
    auto h = [](double t) { return std::min(1.0, t); };
    auto rho = [](double t) { return t; };

    RepMeasure doubled;  // R = 2 h stays within [h, 4h]
    doubled.atoms = {{1.0, 2.0}};
    CHECK(verify_representation(h, rho, doubled, kInf, make_log_grid(kInf, 80)) == 0.0);

    RepMeasure excessive;  // R = 8 h exceeds 4h by half of itself
    excessive.atoms = {{1.0, 8.0}};
    double v = verify_representation(h, rho, excessive, kInf, make_log_grid(kInf, 80));
    CHECK(v == doctest::Approx(0.5).epsilon(1e-9));

    RepMeasure constant;  // R = 1 overshoots 4h near zero
    constant.alpha = ExtValue(1.0);
    double w = verify_representation(h, rho, constant, kInf, make_log_grid(kInf, 80));
    CHECK(w > 0.9);
}

TEST_CASE("log grids span the domain") {
    auto fin = make_log_grid(1.0, 200);
    REQUIRE(fin.size() == 200);
    CHECK(fin.front() == doctest::Approx(1e-9).epsilon(1e-6));
    CHECK(fin.back() == doctest::Approx(1.0 - 1e-9).epsilon(1e-12));
    for (size_t i = 1; i < fin.size(); ++i) CHECK(fin[i - 1] <= fin[i]);
    for (double t : fin) {
        CHECK(t > 0.0);
        CHECK(t < 1.0);
    }

    auto inf = make_log_grid(kInf, 100);
    REQUIRE(inf.size() == 100);
    CHECK(inf.front() == doctest::Approx(1e-8));
    CHECK(inf.back() == doctest::Approx(1e8));
}
