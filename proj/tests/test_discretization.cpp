#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "discretization.hpp"
#include "doctest.h"

using namespace lorembed;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double dbl(const ExtValue& v) {
    return v.is_inf() ? kInf : v.value();
}

bool has_warning(const std::vector<std::string>& ws, const std::string& needle) {
    for (const auto& w : ws)
        if (w.find(needle) != std::string::npos) return true;
    return false;
}

// parabola setup: h = 2t - t^2 against rho = t^2 on (0,1), exact measure
// density 1/s^2, tight sandwich
struct ParabolaCase {
    RealFn h = [](double t) { return 2.0 * t - t * t; };
    RealFn rho = [](double t) { return t * t; };
    RepMeasure rep;
    ParabolaCase() {
        rep.density = [](double s) { return 1.0 / (s * s); };
        rep.analytic_R = [](double t) { return 2.0 * t - t * t; };
        rep.C1 = 1.0;
        rep.C2 = 1.0;
    }
};

// plateau setup: h = min{1,t} against rho = t on (0,inf), one unit atom at 1
struct PlateauCase {
    RealFn h = [](double t) { return std::min(1.0, t); };
    RealFn rho = [](double t) { return t; };
    RepMeasure rep;
    PlateauCase() {
        rep.atoms = {{1.0, 1.0}};
        rep.C1 = 1.0;
        rep.C2 = 1.0;
    }
};

}  // namespace

TEST_CASE("sufficient growth factor formula") {
    CHECK(sufficient_growth_factor(1.0, 1.0, 1.0) == doctest::Approx(108.0));
    CHECK(sufficient_growth_factor(2.0, 1.0, 1.0) == doctest::Approx(std::sqrt(972.0)));
    // doubling C2/C1 doubles the requirement
    CHECK(sufficient_growth_factor(1.0, 1.0, 2.0) == doctest::Approx(216.0));
}

TEST_CASE("plateau sum equals its measure form exactly") {
    PlateauCase pc;
    CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, 220.0, 1.0, kInf);
    REQUIRE(cs.points.size() == 3);  // {0, 1, inf}

    auto f = [](double t) { return std::min(t, 2.0); };
    SidesResult r = sum_integral_equivalence(f, pc.rep, cs, 1.0);
    CHECK(r.warnings.empty());
    CHECK(dbl(r.discrete_sum) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(dbl(r.measure_form) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parabola sides agree within the universal budget") {
    ParabolaCase pc;
    double a = 2.0 * sufficient_growth_factor(2.0, 1.0, 1.0);
    CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, a, 0.5, 1.0);
    CHECK(cs.right_terminates);
    CHECK(cs.truncated_left);
    CHECK(verify_covering_sequence(cs).all_pass());

    auto f = [](double t) { return std::pow(t, 4.0); };  // rho^p-quasiconcave
    SidesResult r = sum_integral_equivalence(f, pc.rep, cs, 2.0);
    CHECK(r.warnings.empty());
    double lhs = dbl(r.discrete_sum), rhs = dbl(r.measure_form);
    CHECK(rhs == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
    CHECK(lhs == doctest::Approx(1.5627).epsilon(1e-3));
    double ratio = lhs / rhs;
    CHECK(ratio >= 1.0 / 64.0);
    CHECK(ratio <= 64.0);

    SUBCASE("sides are linear in f") {
        auto f8 = [&f](double t) { return 8.0 * f(t); };
        SidesResult r8 = sum_integral_equivalence(f8, pc.rep, cs, 2.0);
        CHECK(dbl(r8.discrete_sum) == doctest::Approx(8.0 * lhs).epsilon(1e-12));
        CHECK(dbl(r8.measure_form) == doctest::Approx(8.0 * rhs).epsilon(1e-12));
    }
}

TEST_CASE("side ratio is stable across admissible functions") {
    ParabolaCase pc;
    double a = 2.0 * sufficient_growth_factor(2.0, 1.0, 1.0);
    CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, a, 0.5, 1.0);

    std::vector<RealFn> fs;
    for (int j = 0; j < 7; ++j) {
        double theta = 0.6 + 0.4 * j / 6.0;
        fs.push_back([theta](double t) { return std::pow(t, 4.0 * theta); });
    }
    fs.push_back([](double t) { return std::pow(t, 4.0) / (1.0 + t); });
    fs.push_back([](double t) { return std::pow(t, 4.0) * (2.0 - t); });
    fs.push_back([](double t) { return std::min(std::pow(t, 4.0), 0.3); });

    double rmin = kInf, rmax = 0.0;
    for (const auto& f : fs) {
        SidesResult r = sum_integral_equivalence(f, pc.rep, cs, 2.0);
        double ratio = dbl(r.discrete_sum) / dbl(r.measure_form);
        CHECK(ratio >= 1.0 / 64.0);
        CHECK(ratio <= 64.0);
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
    }
    CHECK(rmax / rmin < 4.0);
}

TEST_CASE("sup triple parts stay equivalent") {
    ParabolaCase pc;
    CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, 220.0, 0.5, 1.0);

    std::vector<RealFn> fs = {
        [](double t) { return t; },
        [](double t) { return std::pow(t, 1.5); },
        [](double t) { return t * t; },
        [](double t) { return t / (1.0 + t); },
        [](double t) { return 4.0 * t * (1.0 - t); },
        [](double t) { return std::min(t, 0.5); },
        [](double t) { return std::pow(t, 1.2); },
        [](double t) { return t - 0.5 * t * t; },
        [](double t) { return std::pow(t, 2.5); },
        [](double t) { return std::pow(t, 1.8); },
    };

    double r13min = kInf, r13max = 0.0, r23min = kInf, r23max = 0.0;
    for (const auto& f : fs) {
        TripleResult tr = sup_partition_triple(f, pc.rep, cs, 2.0);
        CHECK(tr.warnings.empty());
        double q1 = dbl(tr.interval_part), q2 = dbl(tr.kernel_part), q3 = dbl(tr.measure_part);
        for (double r : {q1 / q3, q2 / q3, q1 / q2}) {
            CHECK(r >= 1.0 / 64.0);
            CHECK(r <= 64.0);
        }
        r13min = std::min(r13min, q1 / q3);
        r13max = std::max(r13max, q1 / q3);
        r23min = std::min(r23min, q2 / q3);
        r23max = std::max(r23max, q2 / q3);
    }
    CHECK(r13max / r13min < 4.0);
    CHECK(r23max / r23min < 4.0);

    SUBCASE("degree-p homogeneity") {
        auto f = [](double t) { return t * t; };
        auto f8 = [](double t) { return 8.0 * t * t; };
        TripleResult t1 = sup_partition_triple(f, pc.rep, cs, 2.0);
        TripleResult t8 = sup_partition_triple(f8, pc.rep, cs, 2.0);
        CHECK(dbl(t8.interval_part) == doctest::Approx(64.0 * dbl(t1.interval_part)).epsilon(1e-12));
        CHECK(dbl(t8.kernel_part) == doctest::Approx(64.0 * dbl(t1.kernel_part)).epsilon(1e-12));
        CHECK(dbl(t8.measure_part) == doctest::Approx(64.0 * dbl(t1.measure_part)).epsilon(1e-12));
    }
}

TEST_CASE("integral triple parts stay equivalent") {
    ParabolaCase pc;
    CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, 220.0, 0.5, 1.0);

    std::vector<RealFn> fs = {
        [](double t) { return t; },
        [](double t) { return t * t; },
        [](double t) { return t / (1.0 + t); },
        [](double t) { return 4.0 * t * (1.0 - t); },
    };
    for (const auto& f : fs) {
        TripleResult tr = integral_partition_triple(f, pc.rep, cs, 2.0);
        CHECK(tr.warnings.empty());
        double q1 = dbl(tr.interval_part), q2 = dbl(tr.kernel_part), q3 = dbl(tr.measure_part);
        for (double r : {q1 / q3, q2 / q3, q1 / q2}) {
            CHECK(r >= 1.0 / 64.0);
            CHECK(r <= 64.0);
        }
    }
}

TEST_CASE("kernel sup triple on the plateau") {
    PlateauCase pc;
    CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, 2.0, 1.0, kInf);
    REQUIRE(cs.points.size() == 3);

    auto f = [](double t) { return 1.0 / ((1.0 + t) * (1.0 + t)); };
    SupTripleResult r = kernel_sup_triple(f, pc.h, cs, 1.0);
    CHECK(r.warnings.empty());
    // the sup sits at t = 1 where the kernel integral is exactly 1/2
    CHECK(dbl(r.point_sup) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(dbl(r.continuous_sup) == doctest::Approx(0.5).epsilon(1e-3));
    // the continuous sup dominates the point sup up to grid resolution
    CHECK(dbl(r.continuous_sup) >= dbl(r.point_sup) * (1.0 - 2e-3));
    CHECK(dbl(r.interval_sup) == doctest::Approx(0.5).epsilon(1e-6));
    for (double ratio : {dbl(r.continuous_sup) / dbl(r.point_sup),
                         dbl(r.interval_sup) / dbl(r.point_sup)}) {
        CHECK(ratio >= 1.0 / 64.0);
        CHECK(ratio <= 64.0);
    }

    SUBCASE("degree-p homogeneity") {
        auto f8 = [&f](double t) { return 8.0 * f(t); };
        SupTripleResult r8 = kernel_sup_triple(f8, pc.h, cs, 1.0);
        CHECK(dbl(r8.continuous_sup) ==
              doctest::Approx(8.0 * dbl(r.continuous_sup)).epsilon(1e-12));
        CHECK(dbl(r8.point_sup) == doctest::Approx(8.0 * dbl(r.point_sup)).epsilon(1e-12));
        CHECK(dbl(r8.interval_sup) == doctest::Approx(8.0 * dbl(r.interval_sup)).epsilon(1e-12));
    }
}

TEST_CASE("zero function yields zero everywhere") {
    PlateauCase pc;
    CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, 220.0, 1.0, kInf);
    auto zero = [](double) { return 0.0; };

    SidesResult s = sum_integral_equivalence(zero, pc.rep, cs, 1.0);
    CHECK(s.discrete_sum.is_zero());
    CHECK(s.measure_form.is_zero());

    TripleResult ts = sup_partition_triple(zero, pc.rep, cs, 1.0);
    CHECK(ts.interval_part.is_zero());
    CHECK(ts.kernel_part.is_zero());
    CHECK(ts.measure_part.is_zero());

    TripleResult ti = integral_partition_triple(zero, pc.rep, cs, 1.0);
    CHECK(ti.interval_part.is_zero());
    CHECK(ti.kernel_part.is_zero());
    CHECK(ti.measure_part.is_zero());

    SupTripleResult k = kernel_sup_triple(zero, pc.h, cs, 1.0);
    CHECK(k.continuous_sup.is_zero());
    CHECK(k.point_sup.is_zero());
    CHECK(k.interval_sup.is_zero());
}

TEST_CASE("all quantities grow with f") {
    PlateauCase pc;
    CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, 220.0, 1.0, kInf);
    auto f1 = [](double t) { return t / (1.0 + t); };
    auto f2 = [](double t) { return t / (1.0 + t) + 0.5 * std::min(t, 1.0); };

    SidesResult s1 = sum_integral_equivalence(f1, pc.rep, cs, 1.0);
    SidesResult s2 = sum_integral_equivalence(f2, pc.rep, cs, 1.0);
    CHECK(dbl(s1.discrete_sum) <= dbl(s2.discrete_sum) * (1.0 + 1e-9));
    CHECK(dbl(s1.measure_form) <= dbl(s2.measure_form) * (1.0 + 1e-9));

    SupTripleResult k1 = kernel_sup_triple(f1, pc.h, cs, 1.0);
    SupTripleResult k2 = kernel_sup_triple(f2, pc.h, cs, 1.0);
    CHECK(dbl(k1.continuous_sup) <= dbl(k2.continuous_sup) * (1.0 + 1e-9));
    CHECK(dbl(k1.point_sup) <= dbl(k2.point_sup) * (1.0 + 1e-9));
    CHECK(dbl(k1.interval_sup) <= dbl(k2.interval_sup) * (1.0 + 1e-9));
}

TEST_CASE("warnings flag insufficient growth and truncation") {
    SUBCASE("growth factor below the bound") {
        PlateauCase pc;
        CoveringSequence cs = build_covering_sequence(pc.h, pc.rho, 2.0, 1.0, kInf);
        auto f = [](double t) { return std::min(t, 2.0); };
        SidesResult r = sum_integral_equivalence(f, pc.rep, cs, 1.0);
        CHECK(has_warning(r.warnings, "sufficient"));
        TripleResult tr = sup_partition_triple(f, pc.rep, cs, 1.0);
        CHECK(has_warning(tr.warnings, "sufficient"));
    }

    SUBCASE("dominant truncated tail") {
        auto h = [](double t) { return std::sqrt(t); };
        auto rho = [](double t) { return t; };
        RepMeasure rep;
        rep.density = [](double s) { return 0.25 * std::pow(s, -1.5); };
        rep.analytic_R = [](double t) { return std::sqrt(t); };
        CoveringSequence cs = build_covering_sequence(h, rho, 432.0, 1.0, kInf, 8);
        CHECK(cs.truncated_left);
        CHECK(cs.truncated_right);

        auto f = [](double t) { return t; };
        SidesResult r = sum_integral_equivalence(f, rep, cs, 1.0);
        CHECK(has_warning(r.warnings, "truncation-limited"));
        CHECK(r.measure_form.is_inf());  // the untruncated quantity diverges
    }
}
