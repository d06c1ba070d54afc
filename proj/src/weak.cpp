#include "weak.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "constants.hpp"
#include "quadrature.hpp"

namespace lorembed {

namespace {

double as_dbl(const ExtValue& v) {
    return v.is_inf() ? std::numeric_limits<double>::infinity() : v.value();
}

ConstantReport zero_report(const EmbeddingProblem& prob, const char* why) {
    ConstantReport rep;
    rep.tag = prob.tag();
    rep.A_value = ExtValue(0.0);
    rep.limit_term_zero = ExtValue(0.0);
    rep.limit_term_L = ExtValue(0.0);
    rep.integral_term = ExtValue(0.0);
    rep.auxiliary[why] = 1.0;
    return rep;
}

double interior_probe(const EmbeddingProblem& prob) {
    return std::isinf(prob.L()) ? 1.0 : 0.5 * prob.L();
}

// ---------------------------------------------------------------------------
// Running partial integrals of a representing measure:
//   prefix(t) = gamma + int_(0,t] U dnu,   suffix(t) = delta + nu([t, L)).
// Atoms are handled by cumulative sums (an atom exactly at t counts in both
// partials); an absolutely continuous part is accumulated over the problem
// grid once, with partial cells integrated per query.
struct MeasureScan {
    ExtValue gamma, delta;
    Primitive U;
    double L;
    std::vector<double> loc, mass;
    std::vector<double> cum_u;  // cum_u[i] = sum_{k<i} U(loc[k]) mass[k]
    std::vector<double> suf_m;  // suf_m[i] = sum_{k>=i} mass[k]
    RealFn kappa;
    std::vector<double> g;       // density accumulation grid
    std::vector<double> cum_uk;  // int over (0, g[j]] of U kappa
    std::vector<double> suf_k;   // int over [g[j], L) of kappa

    MeasureScan(const EmbeddingProblem& prob, const RepMeasure& m)
        : gamma(m.alpha), delta(m.beta), U(prob.U()), L(prob.L()) {
        std::vector<RepAtom> atoms = m.atoms;
        std::sort(atoms.begin(), atoms.end(),
                  [](const RepAtom& a, const RepAtom& b) { return a.s < b.s; });
        for (const RepAtom& a : atoms) {
            if (a.mass <= 0.0) continue;
            loc.push_back(a.s);
            mass.push_back(a.mass);
        }
        cum_u.assign(loc.size() + 1, 0.0);
        for (size_t i = 0; i < loc.size(); ++i)
            cum_u[i + 1] = cum_u[i] + U.eval(loc[i]) * mass[i];
        suf_m.assign(loc.size() + 1, 0.0);
        for (size_t i = loc.size(); i-- > 0;) suf_m[i] = suf_m[i + 1] + mass[i];

        if (m.density) {
            kappa = m.density;
            g = prob.grid();
            QuadOptions head;
            head.rel_tol = 1e-9;
            cum_uk.assign(g.size(), 0.0);
            cum_uk[0] = as_dbl(
                integrate([this](double s) { return U.eval(s) * kappa(s); }, 0.0, g[0], head)
                    .value);
            QuadOptions cell;
            cell.rel_tol = 1e-9;
            for (size_t j = 0; j + 1 < g.size(); ++j)
                cum_uk[j + 1] =
                    cum_uk[j] + as_dbl(integrate([this](double s) { return U.eval(s) * kappa(s); },
                                                 g[j], g[j + 1], cell)
                                           .value);
            suf_k.assign(g.size(), 0.0);
            QuadOptions tail;
            tail.rel_tol = 1e-9;
            tail.singular_right = !std::isinf(L);
            suf_k[g.size() - 1] = as_dbl(integrate(kappa, g.back(), L, tail).value);
            for (size_t j = g.size() - 1; j-- > 0;)
                suf_k[j] = suf_k[j + 1] + as_dbl(integrate(kappa, g[j], g[j + 1], cell).value);
        }
    }

    ExtValue prefix(double t) const {
        size_t idx = std::upper_bound(loc.begin(), loc.end(), t) - loc.begin();
        ExtValue out = gamma + ExtValue(cum_u[idx]);
        if (kappa) {
            QuadOptions opt;
            opt.rel_tol = 1e-9;
            if (t <= g.front()) {
                out = out + integrate([this](double s) { return U.eval(s) * kappa(s); }, 0.0, t,
                                      opt)
                                .value;
            } else {
                size_t j = std::upper_bound(g.begin(), g.end(), t) - g.begin() - 1;
                out = out + ExtValue(cum_uk[j]) +
                      integrate([this](double s) { return U.eval(s) * kappa(s); }, g[j], t, opt)
                          .value;
            }
        }
        return out;
    }

    ExtValue suffix(double t) const {
        size_t idx = std::lower_bound(loc.begin(), loc.end(), t) - loc.begin();
        ExtValue out = delta + ExtValue(suf_m[idx]);
        if (kappa) {
            QuadOptions opt;
            opt.rel_tol = 1e-9;
            if (t >= g.back()) {
                opt.singular_right = !std::isinf(L);
                out = out + integrate(kappa, t, L, opt).value;
            } else {
                size_t j = std::lower_bound(g.begin(), g.end(), t) - g.begin();
                out = out + integrate(kappa, t, g[j], opt).value + ExtValue(suf_k[j]);
            }
        }
        return out;
    }
};

using PartialFn = std::function<ExtValue(double)>;

std::pair<PartialFn, PartialFn> partials(const EmbeddingProblem& prob, const WeakRep& rep) {
    if (rep.prefix_fn && rep.suffix_fn) return {rep.prefix_fn, rep.suffix_fn};
    auto scan = std::make_shared<MeasureScan>(prob, rep.measure);
    return {[scan](double t) { return scan->prefix(t); },
            [scan](double t) { return scan->suffix(t); }};
}

double measure_sandwich_excess(const EmbeddingProblem& prob, const RepMeasure& m) {
    return verify_representation([&prob](double t) { return as_dbl(prob.phi_weak(t)); },
                                 [&prob](double t) { return prob.U().eval(t); }, m, prob.L(),
                                 make_log_grid(prob.L(), 200));
}

// ---------------------------------------------------------------------------
// Differentiable construction: when v is itself U-quasiconcave with v'/u
// nonincreasing, the weak fundamental function equals v and
//   dnu = (-v'/u)' dt        (a density inside power pieces, an atom at
//                             every downward jump of v'/u at piece edges)
//   gamma = v(0+),  delta = lim_{L-} v/U,  B1 = 1, B2 = 2.
// Pure powers make everything closed-form: on a merged piece of v and u,
// v'/u = K t^m with K = c_v a_v / c_u and m = a_v - 1 - a_u.

struct PowerSlope {
    std::vector<double> edges;  // 0 = edges[0] < ... < edges[n] = L
    std::vector<double> K, m;   // per segment (edges[i], edges[i+1])
    double s_end = 0.0;         // lim_{t->L-} v'(t)/u(t)

    size_t seg_right(double t) const {
        size_t j = std::upper_bound(edges.begin(), edges.end(), t) - edges.begin();
        if (j == 0) return 0;
        --j;
        return std::min(j, K.size() - 1);
    }
    size_t seg_left(double t) const {
        size_t j = seg_right(t);
        if (j > 0 && edges[j] == t) return j - 1;
        return j;
    }
    double value(size_t seg, double t) const {
        if (K[seg] == 0.0) return 0.0;
        return K[seg] * std::pow(t, m[seg]);
    }
    double right(double t) const { return value(seg_right(t), t); }
    double left(double t) const { return value(seg_left(t), t); }
};

const WeightPiece& piece_at(const WeightSpec& w, double t) {
    for (const WeightPiece& pc : w.pieces())
        if (pc.lo <= t && t < pc.hi) return pc;
    return w.pieces().back();
}

WeakRep differentiable_rep(const EmbeddingProblem& prob) {
    const WeightSpec& v = prob.v();
    const WeightSpec& u = prob.u();
    if (v.is_custom() || u.is_custom())
        throw std::domain_error(
            "differentiable representation needs piecewise power weights; use the generic mode");
    for (const WeightSpec* w : {&v, &u})
        for (const WeightPiece& pc : w->pieces())
            if (pc.anchor != Anchor::Zero || pc.beta != 0.0)
                throw std::domain_error(
                    "differentiable representation needs zero-anchored pure-power pieces; use "
                    "the generic mode");

    QcCheck qc = is_quasiconcave([&v](double t) { return v(t); },
                                 [&prob](double t) { return prob.U().eval(t); }, prob.grid());
    if (!qc.ok)
        throw std::domain_error("v is not U-quasiconcave (violation " +
                                std::to_string(qc.worst) + " at t = " + std::to_string(qc.at) +
                                "); use the generic mode");

    const double L = prob.L();
    auto slope = std::make_shared<PowerSlope>();
    slope->edges.push_back(0.0);
    for (const WeightSpec* w : {&v, &u})
        for (const WeightPiece& pc : w->pieces())
            if (pc.lo > 0.0) slope->edges.push_back(pc.lo);
    std::sort(slope->edges.begin(), slope->edges.end());
    slope->edges.erase(std::unique(slope->edges.begin(), slope->edges.end()),
                       slope->edges.end());
    slope->edges.push_back(L);

    const size_t nseg = slope->edges.size() - 1;
    for (size_t i = 0; i < nseg; ++i) {
        double lo = slope->edges[i];
        double hi = slope->edges[i + 1];
        double mid = std::isinf(hi) ? (lo > 0.0 ? 2.0 * lo : 1.0) : 0.5 * (lo + hi);
        const WeightPiece& pv = piece_at(v, mid);
        const WeightPiece& pu = piece_at(u, mid);
        if (pv.alpha < 0.0)
            throw std::domain_error("v decreases inside a piece; use the generic mode");
        double K = (pv.alpha == 0.0) ? 0.0 : pv.c * pv.alpha / pu.c;
        double m = pv.alpha - 1.0 - pu.alpha;
        if (K > 0.0 && m > 0.0)
            throw std::domain_error("v'/u increases inside a piece; use the generic mode");
        slope->K.push_back(K);
        slope->m.push_back(m);
    }

    std::vector<RepAtom> atoms;
    for (size_t j = 1; j < nseg; ++j) {
        double b = slope->edges[j];
        double drop = slope->value(j - 1, b) - slope->value(j, b);
        if (drop < -1e-9 * std::max(1.0, slope->value(j, b)))
            throw std::domain_error("v'/u jumps upward at a piece edge; use the generic mode");
        if (drop > 0.0) atoms.push_back({b, drop});
    }

    if (std::isinf(L)) {
        double Kn = slope->K.back(), mn = slope->m.back();
        slope->s_end = (Kn == 0.0 || mn < 0.0) ? 0.0 : Kn;  // mn > 0 was rejected above
    } else {
        slope->s_end = slope->value(nseg - 1, L);
    }

    const WeightPiece& first = v.pieces().front();
    ExtValue gamma = (first.alpha == 0.0) ? ExtValue(first.c) : ExtValue(0.0);
    ExtValue delta = limit_at_endpoint(
        [&](double t) { return as_dbl(ExtValue(v(t)) / ExtValue(prob.U().eval(t))); },
        Endpoint::End, L);

    bool has_density = false;
    for (size_t i = 0; i < nseg; ++i)
        if (slope->K[i] > 0.0 && slope->m[i] != 0.0) has_density = true;

    WeakRep rep;
    rep.measure.alpha = gamma;
    rep.measure.beta = delta;
    rep.measure.atoms = std::move(atoms);
    if (has_density)
        rep.measure.density = [slope](double t) {
            size_t j = slope->seg_right(t);
            if (slope->K[j] == 0.0 || slope->m[j] == 0.0) return 0.0;
            return std::max(0.0, -slope->K[j] * slope->m[j] * std::pow(t, slope->m[j] - 1.0));
        };
    rep.measure.C1 = 1.0;
    rep.measure.C2 = 2.0;

    // Closed-form partials, integrating the measure by parts:
    //   gamma + int_(0,t] U dnu = v(t) - U(t) (v'/u)(t+)
    //   delta + nu([t, L))      = delta + (v'/u)(t-) - (v'/u)(L-)
    // (U (v'/u) -> 0 at 0+ for power pieces, and the decrement of v'/u
    // telescopes across densities and jump atoms alike).
    EmbeddingProblem copy = prob;
    WeightSpec vcopy = v;
    rep.prefix_fn = [copy, vcopy, slope](double t) {
        return ExtValue(std::max(0.0, vcopy(t) - copy.U().eval(t) * slope->right(t)));
    };
    double dd = as_dbl(delta);
    rep.suffix_fn = [dd, slope](double t) {
        return ExtValue(std::max(0.0, dd + slope->left(t) - slope->s_end));
    };

    rep.sandwich_excess = measure_sandwich_excess(prob, rep.measure);
    return rep;
}

// ---------------------------------------------------------------------------
// Generic construction from the weak fundamental function itself: the ratio
// phi/U is nonincreasing, and its decrement over each grid cell becomes an
// atom at the cell's geometric midpoint; gamma and delta are the endpoint
// limits; B1 = 1, B2 = 4 is the canonical sandwich.  Decrement below the
// first grid point is left to the gamma term (its U-weighted contribution
// vanishes with the grid edge); the residual ratio drop beyond the last grid
// point becomes a final atom there.

WeakRep generic_rep(const EmbeddingProblem& prob) {
    if (prob.weak_degenerate())
        throw std::domain_error(
            "weak fundamental function is infinite; no finite representation exists");
    const double L = prob.L();
    ExtValue gamma =
        limit_at_endpoint([&](double t) { return as_dbl(prob.phi_weak(t)); }, Endpoint::Zero, L);
    ExtValue delta = limit_at_endpoint(
        [&](double t) { return as_dbl(prob.phi_weak(t) / ExtValue(prob.U().eval(t))); },
        Endpoint::End, L);

    const std::vector<double>& g = prob.grid();
    std::vector<double> ratio(g.size());
    for (size_t j = 0; j < g.size(); ++j)
        ratio[j] = as_dbl(prob.phi_weak(g[j]) / ExtValue(prob.U().eval(g[j])));

    WeakRep rep;
    rep.measure.alpha = gamma;
    rep.measure.beta = delta;
    for (size_t j = 0; j + 1 < g.size(); ++j) {
        double drop = ratio[j] - ratio[j + 1];
        if (drop > 0.0) rep.measure.atoms.push_back({std::sqrt(g[j] * g[j + 1]), drop});
    }
    double residue = ratio.back() - as_dbl(delta);
    if (residue > 0.0) rep.measure.atoms.push_back({g.back(), residue});
    rep.measure.C1 = 1.0;
    rep.measure.C2 = 4.0;

    auto scan = std::make_shared<MeasureScan>(prob, rep.measure);
    rep.prefix_fn = [scan](double t) { return scan->prefix(t); };
    rep.suffix_fn = [scan](double t) { return scan->suffix(t); };
    rep.sandwich_excess = measure_sandwich_excess(prob, rep.measure);
    return rep;
}

}  // namespace

ExtValue phi_weak(const EmbeddingProblem& prob, double t) { return prob.phi_weak(t); }

WeakRep weak_rep(const EmbeddingProblem& prob, WeakRepMode mode) {
    if (!std::isinf(prob.p())) throw std::invalid_argument("weak_rep requires p = inf");
    if (mode == WeakRepMode::Differentiable) return differentiable_rep(prob);
    return generic_rep(prob);
}

WeakRep weak_rep_user(const EmbeddingProblem& prob, RepMeasure measure) {
    if (!std::isinf(prob.p())) throw std::invalid_argument("weak_rep_user requires p = inf");
    WeakRep rep;
    rep.measure = std::move(measure);
    auto scan = std::make_shared<MeasureScan>(prob, rep.measure);
    rep.prefix_fn = [scan](double t) { return scan->prefix(t); };
    rep.suffix_fn = [scan](double t) { return scan->suffix(t); };
    rep.sandwich_excess = measure_sandwich_excess(prob, rep.measure);
    return rep;
}

ConstantReport A6(const EmbeddingProblem& prob, const WeakRep& rep) {
    const double q = prob.q();
    if (!std::isinf(prob.p()) || q < 1.0)
        throw std::invalid_argument("A6 requires p = inf and q >= 1");
    if (prob.weak_degenerate()) return zero_report(prob, "weak_degenerate");
    ConstantReport out;
    out.tag = prob.tag();

    ExtValue lim0 = limit_at_endpoint(
        [&](double t) { return as_dbl(ExtValue(prob.U().eval(t)) / prob.phi_weak(t)); },
        Endpoint::Zero, prob.L());
    SupResult sup = sup_search(
        [&](double t) {
            return as_dbl(ext_pow(ExtValue(prob.W().eval(t)), 1.0 / q) /
                          ExtValue(prob.U().eval(t)));
        },
        prob.L());
    out.limit_term_zero = lim0 * sup.value;

    ExtValue limL = limit_at_endpoint(
        [&](double t) { return as_dbl(ExtValue(1.0) / prob.phi_weak(t)); }, Endpoint::End,
        prob.L());
    out.limit_term_L = limL * ext_pow(prob.W_at_L(), 1.0 / q);

    auto part = partials(prob, rep);
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    opt.abs_tol = 1e-14;
    opt.singular_left = true;
    opt.singular_right = !std::isinf(prob.L());
    QuadResult integral = integrate(
        [&](double t) {
            return as_dbl(ext_prod_pow({{prob.U().eval(t), q},
                                        {as_dbl(prob.envelope_supWq(t)), 1.0},
                                        {as_dbl(prob.phi_weak(t)), -(q + 2.0)},
                                        {prob.u()(t), 1.0},
                                        {as_dbl(part.first(t)), 1.0},
                                        {as_dbl(part.second(t)), 1.0}}));
        },
        0.0, prob.L(), opt);
    out.integral_term = ext_pow(integral.value, 1.0 / q);
    out.auxiliary["quad_converged"] = integral.converged ? 1.0 : 0.0;
    out.auxiliary["B1"] = rep.B1();
    out.auxiliary["B2"] = rep.B2();
    out.auxiliary["sandwich_excess"] = rep.sandwich_excess;

    out.A_value = out.limit_term_zero + out.limit_term_L + out.integral_term;
    return out;
}

ConstantReport A7(const EmbeddingProblem& prob, const WeakRep& rep) {
    const double q = prob.q();
    if (!std::isinf(prob.p()) || q >= 1.0)
        throw std::invalid_argument("A7 requires p = inf and q < 1");
    if (prob.weak_degenerate()) return zero_report(prob, "weak_degenerate");
    ConstantReport out;
    out.tag = prob.tag();

    ExtValue lim0 = limit_at_endpoint(
        [&](double t) { return as_dbl(ExtValue(prob.U().eval(t)) / prob.phi_weak(t)); },
        Endpoint::Zero, prob.L());
    out.limit_term_zero = lim0 * ext_pow(prob.wtail(0.0), (1.0 - q) / q);

    ExtValue limL = limit_at_endpoint(
        [&](double t) { return as_dbl(ExtValue(1.0) / prob.phi_weak(t)); }, Endpoint::End,
        prob.L());
    out.limit_term_L = limL * ext_pow(prob.W_at_L(), 1.0 / q);

    auto part = partials(prob, rep);
    auto term = [&](double t) {
        return ext_prod_pow({{as_dbl(xi_weak(prob, t)), 1.0},
                             {as_dbl(prob.phi_weak(t)), -(q + 2.0)},
                             {prob.u()(t), 1.0},
                             {as_dbl(part.first(t)), 1.0},
                             {as_dbl(part.second(t)), 1.0}});
    };
    if (xi_strong(prob, interior_probe(prob)).is_inf()) {
        // xi is infinite at one t exactly when it is infinite at every t, so
        // the integrand is infinite wherever the remaining factors are
        // positive and zero where they vanish; the integral is infinite as
        // soon as any probe point is (for piecewise weights the positivity
        // set is a union of intervals, visible on a log grid)
        ExtValue val(0.0);
        for (double t : make_log_grid(prob.L(), 64))
            if (term(t).is_inf()) {
                val = ExtValue::infinity();
                break;
            }
        out.integral_term = val;
        out.auxiliary["assumxi"] = 0.0;
    } else {
        QuadOptions opt;
        opt.rel_tol = 1e-7;
        opt.abs_tol = 1e-14;
        opt.singular_left = true;
        opt.singular_right = !std::isinf(prob.L());
        QuadResult integral =
            integrate([&](double t) { return as_dbl(term(t)); }, 0.0, prob.L(), opt);
        out.integral_term = ext_pow(integral.value, 1.0 / q);
        out.auxiliary["assumxi"] = 1.0;
        out.auxiliary["quad_converged"] = integral.converged ? 1.0 : 0.0;
    }
    out.auxiliary["B1"] = rep.B1();
    out.auxiliary["B2"] = rep.B2();
    out.auxiliary["sandwich_excess"] = rep.sandwich_excess;

    out.A_value = out.limit_term_zero + out.limit_term_L + out.integral_term;
    return out;
}

ConstantReport A8(const EmbeddingProblem& prob) {
    const double q = prob.q();
    if (!std::isinf(prob.p()) || q >= 1.0)
        throw std::invalid_argument("A8 requires p = inf and q < 1");
    const double assumxi = xi_strong(prob, interior_probe(prob)).is_inf() ? 0.0 : 1.0;
    if (prob.weak_degenerate()) {
        ConstantReport out = zero_report(prob, "weak_degenerate");
        out.auxiliary["assumxi"] = assumxi;
        return out;
    }
    ConstantReport out;
    out.tag = prob.tag();
    const double c = q / (1.0 - q);

    QuadOptions opt;
    opt.rel_tol = 1e-7;
    opt.abs_tol = 1e-14;
    opt.singular_left = true;
    opt.singular_right = !std::isinf(prob.L());
    // the xi factor enters as xi_weak^{-q/(1-q)}; since xi_weak is the
    // min-kernel integral to the power 1-q, that is xi_strong^{-q}, which
    // also resolves the violated-assumption case: xi identically infinite
    // makes the integrand 0 and the whole expression collapses to 0
    QuadResult integral = integrate(
        [&](double t) {
            // xi is mathematically positive on the interior; floor it so an
            // underflowed sum cannot masquerade as a genuine zero under the
            // negative power.
            ExtValue xi = xi_strong(prob, t);
            double xs = xi.is_inf() ? std::numeric_limits<double>::infinity()
                                    : positive_floor(xi.value());
            return as_dbl(ext_prod_pow({{as_dbl(prob.phi_weak(t)), -q},
                                        {xs, -q},
                                        {prob.W().eval(t), c},
                                        {prob.w()(t), 1.0}}));
        },
        0.0, prob.L(), opt);
    out.integral_term = ext_pow(integral.value, 1.0 / q);
    out.A_value = out.integral_term;
    out.auxiliary["assumxi"] = assumxi;
    out.auxiliary["quad_converged"] = integral.converged ? 1.0 : 0.0;
    return out;
}

}  // namespace lorembed
