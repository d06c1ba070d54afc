#include <doctest.h>

#include <cmath>
#include <random>

#include "quadrature.hpp"

using namespace lorembed;

TEST_CASE("inverse-square integral away from the origin") {
    auto r = integrate([](double s) { return 1.0 / (s * s); }, 0.5, 1.0);
    CHECK(r.converged);
    CHECK(r.value.value() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero integrand over the whole half-line") {
    auto r = integrate([](double) { return 0.0; }, 0.0, std::numeric_limits<double>::infinity());
    CHECK(r.converged);
    CHECK(r.value.is_zero());
}

TEST_CASE("non-integrable pole at the right endpoint is declared infinite") {
    QuadOptions opt;
    opt.singular_right = true;
    auto r = integrate([](double s) { return 1.0 / (1.0 - s); }, 0.5, 1.0, opt);
    CHECK(r.value.is_inf());
}

TEST_CASE("non-integrable pole at zero is declared infinite") {
    auto r = integrate([](double s) { return 1.0 / s; }, 0.0, 1.0);
    CHECK(r.value.is_inf());
    auto r2 = integrate([](double s) { return std::pow(s, -1.25); }, 0.0, 1.0);
    CHECK(r2.value.is_inf());
}

TEST_CASE("integrable endpoint singularities") {
    auto r = integrate([](double s) { return 1.0 / std::sqrt(s); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value.value() == doctest::Approx(2.0).epsilon(1e-9));
    QuadOptions opt;
    opt.singular_right = true;
    auto r2 = integrate([](double s) { return 1.0 / std::sqrt(1.0 - s); }, 0.0, 1.0, opt);
    CHECK(r2.converged);
    CHECK(r2.value.value() == doctest::Approx(2.0).epsilon(1e-9));
    // Logarithmic factor at zero.
    auto r3 = integrate([](double s) { return std::log(1.0 / s); }, 0.0, 1.0);
    CHECK(r3.value.value() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tail on the half-line") {
    auto inf = std::numeric_limits<double>::infinity();
    auto r = integrate([](double s) { return 1.0 / (s * s); }, 1.0, inf);
    CHECK(r.converged);
    CHECK(r.value.value() == doctest::Approx(1.0).epsilon(1e-9));
    auto r2 = integrate([](double s) { return std::exp(-s); }, 0.0, inf);
    CHECK(r2.value.value() == doctest::Approx(1.0).epsilon(1e-9));
    auto r3 = integrate([](double s) { return 1.0 / s; }, 1.0, inf);
    CHECK(r3.value.is_inf());
}

TEST_CASE("converged results respect the tolerance contract") {
    QuadOptions opt;
    auto r = integrate([](double s) { return std::sin(s) * std::sin(s) + 0.3; }, 0.2, 3.0, opt);
    CHECK(r.converged);
    CHECK(r.abs_error <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(r.value.value())));
}

TEST_CASE("additivity across random split points") {
    std::mt19937_64 rng(20240817ULL);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        double c1 = 0.5 + U(rng), c2 = U(rng), alpha = -0.5 + 1.5 * U(rng);
        auto f = [=](double s) { return c1 * std::pow(s, alpha) + c2 * std::cos(3.0 * s) * std::cos(3.0 * s); };
        double a = 0.1 + 0.2 * U(rng), b = 2.0 + U(rng);
        double m = a + (b - a) * (0.2 + 0.6 * U(rng));
        auto whole = integrate(f, a, b);
        auto left = integrate(f, a, m);
        auto right = integrate(f, m, b);
        double lhs = whole.value.value();
        double rhs = left.value.value() + right.value.value();
        CHECK(std::fabs(lhs - rhs) <=
              whole.abs_error + left.abs_error + right.abs_error + 1e-12 * std::fabs(lhs) + 1e-14);
    }
}

TEST_CASE("integrand NaN raises EvalError") {
    CHECK_THROWS_AS(integrate([](double s) { return std::sqrt(s - 2.0); }, 1.0, 3.0), EvalError);
}

TEST_CASE("supremum with interior maximum") {
    auto r = sup_search([](double t) { return t * std::exp(-t); }, std::numeric_limits<double>::infinity());
    CHECK(r.value.value() == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
    CHECK(r.argmax == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_FALSE(r.at_left);
    CHECK_FALSE(r.at_right);
}

TEST_CASE("supremum attained at the right boundary") {
    auto r = sup_search([](double t) { return 1.0 / std::sqrt(2.0 - t); }, 1.0);
    CHECK(r.value.value() == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.at_right);
}

TEST_CASE("supremum scale equivariance is exact for power-of-two factors") {
    auto g = [](double t) { return t / (1.0 + t * t); };
    auto base = sup_search(g, 4.0);
    auto scaled = sup_search([&](double t) { return 4.0 * g(t); }, 4.0);
    CHECK(scaled.value.value() == 4.0 * base.value.value());
    CHECK(scaled.argmax == base.argmax);
}

TEST_CASE("supremum of the zero function") {
    auto r = sup_search([](double) { return 0.0; }, 1.0);
    CHECK(r.value.is_zero());
}

TEST_CASE("supremum that diverges at an endpoint") {
    auto r = sup_search([](double t) { return 1.0 / t; }, 1.0);
    CHECK(r.value.is_inf());
}

TEST_CASE("limits at both endpoints") {
    // (t^2/3 + (1 - t)) appears as a mean of a quadratic weight; limit 1 at zero.
    auto g = [](double t) { return 1.0 / (t / 3.0 + 1.0 - t); };
    CHECK(limit_at_endpoint(g, Endpoint::Zero, 1.0).value() == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(limit_at_endpoint(g, Endpoint::End, 1.0).value() == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(limit_at_endpoint([](double t) { return 1.0 / t; }, Endpoint::Zero, 1.0).is_inf());
    CHECK(limit_at_endpoint([](double t) { return t; }, Endpoint::Zero, 1.0).is_zero());
    CHECK(limit_at_endpoint([](double t) { return 1.0 / t; }, Endpoint::Zero,
                            std::numeric_limits<double>::infinity())
              .is_inf());
    CHECK(limit_at_endpoint([](double t) { return 2.0 + 1.0 / t; }, Endpoint::End,
                            std::numeric_limits<double>::infinity())
              .value() == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("oscillating endpoint behavior is reported, constants pass through") {
    CHECK_THROWS_WITH_AS(
        (void)limit_at_endpoint([](double t) { return 2.0 + std::sin(1.0 / t); }, Endpoint::Zero, 1.0),
        doctest::Contains("limit not resolved"), std::runtime_error);
    CHECK(limit_at_endpoint([](double) { return 0.7; }, Endpoint::Zero, 1.0).value() ==
          doctest::Approx(0.7));
}
