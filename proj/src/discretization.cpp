#include "discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lorembed {

namespace {

double as_dbl(const ExtValue& v) {
    return v.is_inf() ? std::numeric_limits<double>::infinity() : v.value();
}

// Term at a covering-sequence point; sentinel entries mean one-sided limits.
// Interior points evaluate in extended arithmetic so that an underflowed
// factor against an overflowed one resolves by the 0*inf = 0 convention
// instead of producing NaN in plain doubles.
ExtValue point_term(const CoveringSequence& cs, size_t i,
                    const std::function<ExtValue(double)>& term) {
    auto dbl = [&](double t) { return as_dbl(term(t)); };
    if (i == 0 && cs.left_terminates) return limit_at_endpoint(dbl, Endpoint::Zero, cs.L);
    if (i + 1 == cs.points.size() && cs.right_terminates)
        return limit_at_endpoint(dbl, Endpoint::End, cs.L);
    return term(cs.points[i]);
}

// int G dnu over (0, L): atoms plus the absolutely continuous part.
ExtValue nu_integral(const RepMeasure& rep, double L, const RealFn& G, double rel) {
    ExtValue total(0.0);
    for (const RepAtom& a : rep.atoms) total = total + ExtValue(a.mass) * ExtValue(G(a.s));
    if (rep.density) {
        QuadOptions opt;
        opt.rel_tol = rel;
        opt.abs_tol = 1e-13;
        opt.singular_left = true;
        opt.singular_right = !std::isinf(L);
        QuadResult q = integrate([&](double t) { return rep.density(t) * G(t); }, 0.0, L, opt);
        total = total + q.value;
    }
    return total;
}

QuadOptions interval_opts(double lo, double hi, double L, double rel) {
    QuadOptions opt;
    opt.rel_tol = rel;
    opt.abs_tol = 1e-13;
    opt.singular_left = (lo == 0.0);
    opt.singular_right = (hi == L) && !std::isinf(hi);
    return opt;
}

}  // namespace

double sufficient_growth_factor(double p, double C1, double C2) {
    double ap = 12.0 * std::pow(3.0, p + std::max(1.0, p)) * std::pow(C2, p) /
                (std::min(1.0, p) * std::pow(C1, p));
    return std::pow(ap, 1.0 / p);
}

SidesResult sum_integral_equivalence(const RealFn& f, const RepMeasure& rep,
                                     const CoveringSequence& cs, double p) {
    SidesResult res;
    if (!(cs.a > sufficient_growth_factor(p, rep.C1, rep.C2)))
        res.warnings.push_back("growth factor a below the sufficient bound for this p, C1, C2");

    const auto& X = cs.points;
    auto term = [&](double t) {
        return ExtValue(f(t)) * ext_pow(ExtValue(cs.h(t)) / ExtValue(cs.rho(t)), p);
    };

    std::vector<ExtValue> terms;
    terms.reserve(X.size());
    ExtValue lhs(0.0);
    for (size_t i = 0; i < X.size(); ++i) {
        terms.push_back(point_term(cs, i, term));
        lhs = lhs + terms.back();
    }
    if (!lhs.is_zero() && !lhs.is_inf() && !terms.empty()) {
        bool left_heavy = cs.truncated_left && terms.front().value() > 0.01 * lhs.value();
        bool right_heavy = cs.truncated_right && terms.back().value() > 0.01 * lhs.value();
        if (left_heavy || right_heavy) res.warnings.push_back("truncation-limited");
    }
    res.discrete_sum = lhs;

    ExtValue rhs(0.0);
    if (!rep.alpha.is_zero()) {
        ExtValue lim0 = limit_at_endpoint(
            [&](double t) {
                return as_dbl(ExtValue(f(t)) * ext_pow(ExtValue(cs.rho(t)), -p));
            },
            Endpoint::Zero, cs.L);
        rhs = rhs + ext_pow(rep.alpha, p) * lim0;
    }
    if (!rep.beta.is_zero()) {
        ExtValue limL = limit_at_endpoint(f, Endpoint::End, cs.L);
        rhs = rhs + ext_pow(rep.beta, p) * limL;
    }
    auto G = [&](double t) {
        ExtValue inner = measure_min_value(rep, cs.rho, cs.L, t, 1e-8);
        ExtValue g = ExtValue(f(t)) * ext_pow(ExtValue(cs.rho(t)), 1.0 - p) *
                     ext_pow(inner, p - 1.0);
        return as_dbl(g);
    };
    rhs = rhs + nu_integral(rep, cs.L, G, 1e-6);
    res.measure_form = rhs;
    return res;
}

TripleResult sup_partition_triple(const RealFn& f, const RepMeasure& rep,
                                  const CoveringSequence& cs, double p) {
    TripleResult res;
    if (!(cs.a > 108.0 * rep.C2 / rep.C1))
        res.warnings.push_back("growth factor a below the sufficient bound 108*C2/C1");

    const double ip = 1.0 / p;
    const auto& X = cs.points;

    auto g1 = [&](double t) {
        return as_dbl(ext_pow(ExtValue(cs.h(t)) / ExtValue(cs.rho(t)), ip) * ExtValue(f(t)));
    };
    ExtValue q1(0.0);
    for (size_t i = 1; i < X.size(); ++i)
        q1 = q1 + ext_pow(sup_on(g1, X[i - 1], X[i]).value, p);
    res.interval_part = q1;

    auto term2 = [&](double x) {
        double rx = std::pow(cs.rho(x), ip);
        ExtValue s =
            sup_search([&](double t) { return f(t) / (rx + std::pow(cs.rho(t), ip)); }, cs.L)
                .value;
        return ExtValue(cs.h(x)) * ext_pow(s, p);
    };
    ExtValue q2(0.0);
    for (size_t i = 0; i < X.size(); ++i) q2 = q2 + point_term(cs, i, term2);
    res.kernel_part = q2;

    ExtValue q3(0.0);
    if (!rep.alpha.is_zero()) {
        ExtValue s = sup_search(
                         [&](double t) {
                             return as_dbl(ExtValue(f(t)) * ext_pow(ExtValue(cs.rho(t)), -ip));
                         },
                         cs.L)
                         .value;
        q3 = q3 + rep.alpha * ext_pow(s, p);
    }
    if (!rep.beta.is_zero()) q3 = q3 + rep.beta * ext_pow(sup_search(f, cs.L).value, p);
    auto G3 = [&](double t) {
        double rt = std::pow(cs.rho(t), ip);
        ExtValue s = sup_search(
                         [&](double tau) { return rt * f(tau) / (rt + std::pow(cs.rho(tau), ip)); },
                         cs.L)
                         .value;
        return as_dbl(ext_pow(s, p));
    };
    q3 = q3 + nu_integral(rep, cs.L, G3, 1e-6);
    res.measure_part = q3;
    return res;
}

TripleResult integral_partition_triple(const RealFn& f, const RepMeasure& rep,
                                       const CoveringSequence& cs, double p) {
    TripleResult res;
    if (!(cs.a > 108.0 * rep.C2 / rep.C1))
        res.warnings.push_back("growth factor a below the sufficient bound 108*C2/C1");

    const double ip = 1.0 / p;
    const auto& X = cs.points;

    auto g1 = [&](double t) {
        return as_dbl(ext_pow(ExtValue(cs.h(t)) / ExtValue(cs.rho(t)), ip) * ExtValue(f(t)));
    };
    ExtValue q1(0.0);
    for (size_t i = 1; i < X.size(); ++i) {
        QuadResult q = integrate(g1, X[i - 1], X[i], interval_opts(X[i - 1], X[i], cs.L, 1e-8));
        q1 = q1 + ext_pow(q.value, p);
    }
    res.interval_part = q1;

    auto kernel_int = [&](double x) {
        double rx = std::pow(cs.rho(x), ip);
        QuadResult q =
            integrate([&](double t) { return f(t) / (rx + std::pow(cs.rho(t), ip)); }, 0.0, cs.L,
                      interval_opts(0.0, cs.L, cs.L, 1e-8));
        return q.value;
    };
    auto term2 = [&](double x) { return ExtValue(cs.h(x)) * ext_pow(kernel_int(x), p); };
    ExtValue q2(0.0);
    for (size_t i = 0; i < X.size(); ++i) q2 = q2 + point_term(cs, i, term2);
    res.kernel_part = q2;

    ExtValue q3(0.0);
    if (!rep.alpha.is_zero()) {
        QuadResult q = integrate(
            [&](double t) {
                return as_dbl(ExtValue(f(t)) * ext_pow(ExtValue(cs.rho(t)), -ip));
            },
            0.0, cs.L, interval_opts(0.0, cs.L, cs.L, 1e-8));
        q3 = q3 + rep.alpha * ext_pow(q.value, p);
    }
    if (!rep.beta.is_zero()) {
        QuadResult q = integrate(f, 0.0, cs.L, interval_opts(0.0, cs.L, cs.L, 1e-8));
        q3 = q3 + rep.beta * ext_pow(q.value, p);
    }
    auto G3 = [&](double t) {
        double rt = std::pow(cs.rho(t), ip);
        QuadResult q =
            integrate([&](double s) { return rt * f(s) / (rt + std::pow(cs.rho(s), ip)); }, 0.0,
                      cs.L, interval_opts(0.0, cs.L, cs.L, 1e-8));
        return as_dbl(ext_pow(q.value, p));
    };
    q3 = q3 + nu_integral(rep, cs.L, G3, 1e-6);
    res.measure_part = q3;
    return res;
}

SupTripleResult kernel_sup_triple(const RealFn& f, const RealFn& phi,
                                  const CoveringSequence& cs, double p) {
    SupTripleResult res;
    const double ip = 1.0 / p;
    const auto& X = cs.points;

    auto kernel_int = [&](double x) {
        double rx = std::pow(cs.rho(x), ip);
        QuadResult q =
            integrate([&](double t) { return f(t) / (rx + std::pow(cs.rho(t), ip)); }, 0.0, cs.L,
                      interval_opts(0.0, cs.L, cs.L, 1e-8));
        return q.value;
    };
    auto term = [&](double t) { return ExtValue(phi(t)) * ext_pow(kernel_int(t), p); };

    res.continuous_sup = sup_search([&](double t) { return as_dbl(term(t)); }, cs.L).value;

    ExtValue s2(0.0);
    for (size_t i = 0; i < X.size(); ++i) {
        ExtValue v = point_term(cs, i, term);
        if (s2 < v) s2 = v;
    }
    res.point_sup = s2;

    auto g3 = [&](double t) {
        return as_dbl(ext_pow(ExtValue(phi(t)) / ExtValue(cs.rho(t)), ip) * ExtValue(f(t)));
    };
    ExtValue s3(0.0);
    for (size_t i = 1; i < X.size(); ++i) {
        QuadResult q = integrate(g3, X[i - 1], X[i], interval_opts(X[i - 1], X[i], cs.L, 1e-8));
        ExtValue v = ext_pow(q.value, p);
        if (s3 < v) s3 = v;
    }
    res.interval_sup = s3;
    return res;
}

}  // namespace lorembed
