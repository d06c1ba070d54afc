#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "quasiconcave.hpp"

namespace lorembed {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

/// Ratio evaluator for the ascent.  The Lorentz norm is exact (primitive
/// increments); the averaged-function norm is exact on the first piece and on
/// the tail and integrates interior pieces adaptively at a loose tolerance.
/// Everything is deterministic in the canonical representation, so a refined
/// partition of the same function scores bit-identically.
struct Scorer {
    const EmbeddingProblem& prob;
    double L, p, q;
    bool weak;

    explicit Scorer(const EmbeddingProblem& pr)
        : prob(pr), L(pr.L()), p(pr.p()), q(pr.q()), weak(std::isinf(pr.p())) {}

    ExtValue lam(const StepFunction& c) const {
        const Primitive& W = prob.W();
        ExtValue sum(0.0);
        double prev = 0.0;
        for (size_t i = 0; i < c.breaks.size(); ++i) {
            double b = c.breaks[i];
            ExtValue dW;
            if (b >= L) {
                ExtValue WL = prob.W_at_L();
                dW = WL.is_inf() ? ExtValue::infinity()
                                 : ExtValue(WL.value() - W.eval(prev));
            } else {
                dW = ExtValue(W.between(prev, b));
            }
            sum = sum + ext_pow(ExtValue(c.values[i]), q) * dW;
            prev = b;
        }
        return ext_pow(sum, 1.0 / q);
    }

    /// Deterministic cheap sup of g over (a, b): log-spaced interior nodes
    /// plus geometric approaches into both edges.
    static double node_sup(const RealFn& g, double a, double b) {
        double best = 0.0;
        auto look = [&](double t) {
            if (t > a && t < b) best = std::max(best, g(t));
        };
        for (int i = 1; i < 12; ++i) look(a + (b - a) * i / 12.0);
        for (int j = 1; j <= 6; ++j) {
            double off = (b - a) * std::pow(0.25, j);
            look(a + off);
            look(b - off);
        }
        return best;
    }

    ExtValue gam(const StepFunction& c) const {
        const Primitive& U = prob.U();
        size_t N = c.breaks.size();
        std::vector<double> S(N + 1, 0.0);
        for (size_t i = 0; i < N; ++i) {
            double lo = i == 0 ? 0.0 : c.breaks[i - 1];
            S[i + 1] = S[i] + c.values[i] * U.between(lo, std::min(c.breaks[i], L));
        }
        const WeightSpec& vw = prob.v();
        auto averaged = [&](size_t i, double t) {
            return (S[i] + c.values[i] * U.between(c.breaks[i - 1], t)) / U.eval(t);
        };
        if (weak) {
            ExtValue best = ExtValue(c.values[0]) *
                            ExtValue(node_sup([&](double t) { return vw(t); }, 0.0, c.breaks[0]));
            for (size_t i = 1; i < N; ++i) {
                double s = node_sup([&](double t) { return averaged(i, t) * vw(t); },
                                    c.breaks[i - 1], c.breaks[i]);
                if (ExtValue(s) > best) best = ExtValue(s);
            }
            if (c.breaks[N - 1] < L && S[N] > 0.0) {
                ExtValue s = ExtValue(S[N]) *
                             ExtValue(node_sup([&](double t) { return vw(t) / U.eval(t); },
                                               c.breaks[N - 1], L));
                if (s > best) best = s;
            }
            return best;
        }
        ExtValue total = ext_pow(ExtValue(c.values[0]), p) * ExtValue(prob.V().eval(std::min(c.breaks[0], L)));
        QuadOptions opt;
        opt.rel_tol = 1e-8;
        opt.abs_tol = 1e-14;
        for (size_t i = 1; i < N; ++i) {
            QuadOptions o = opt;
            o.singular_right = (c.breaks[i] >= L) && std::isfinite(L);
            total = total + integrate([&](double t) {
                                return std::pow(averaged(i, t), p) * vw(t);
                            },
                            c.breaks[i - 1], std::min(c.breaks[i], L), o)
                                .value;
        }
        if (c.breaks[N - 1] < L && S[N] > 0.0)
            total = total + ext_pow(ExtValue(S[N]), p) * prob.tail(c.breaks[N - 1]);
        return ext_pow(total, 1.0 / p);
    }

    ExtValue ratio(const StepFunction& f) const {
        StepFunction c = canonical(f);
        if (c.values.empty()) return ExtValue(0.0);
        return lam(c) / gam(c);
    }
};

/// Ascent state: breaks carried as quantile fractions of the inner primitive,
/// values pinned to a leading 1 (the ratio is homogeneous).
struct AscentState {
    std::vector<double> fracs;   // strictly increasing in (0, 1)
    std::vector<double> vals;    // nonincreasing, vals[0] == 1 after renorm

    size_t n() const { return fracs.size(); }

    StepFunction to_step(const Primitive& U, double Ueff) const {
        StepFunction f;
        f.breaks.reserve(n());
        f.values.reserve(n());
        for (size_t i = 0; i < n(); ++i) {
            double b = inverse_primitive(U, fracs[i] * Ueff);
            if (!f.breaks.empty() && !(b > f.breaks.back())) continue;
            f.breaks.push_back(b);
            f.values.push_back(vals[i]);
        }
        return f;
    }

    /// Split pieces as evenly as possible into n_new, preserving the function.
    AscentState refined(size_t n_new) const {
        AscentState out;
        out.fracs.reserve(n_new);
        out.vals.reserve(n_new);
        size_t base = n_new / n(), extra = n_new % n();
        double prev = 0.0;
        for (size_t i = 0; i < n(); ++i) {
            size_t m = base + (i < extra ? 1 : 0);
            for (size_t j = 1; j <= m; ++j) {
                // Keep original piece ends bit-exact so the canonical form
                // (and therefore the score) of the refined state matches.
                out.fracs.push_back(j == m ? fracs[i]
                                           : prev + (fracs[i] - prev) * double(j) / double(m));
                out.vals.push_back(vals[i]);
            }
            prev = fracs[i];
        }
        return out;
    }

    void renorm() {
        double c0 = vals[0];
        if (c0 > 0.0 && c0 != 1.0)
            for (double& v : vals) v /= c0;
    }
};

struct BestTracker {
    double score = 0.0;
    StepFunction witness;

    void offer(const ExtValue& s, const StepFunction& f) {
        if (!s.is_inf() && s.value() > score) {
            score = s.value();
            witness = canonical(f);
        }
    }
};

/// Coordinate ascent at fixed resolution.  Coordinates cycle deterministically
/// (all breaks, then all values except the pinned first); the random stream
/// only supplies step magnitudes.  Accepts strict improvements only.
void ascend(AscentState& st, const Scorer& sc, const Primitive& U, double Ueff,
            std::mt19937_64& rng, long slice, long& spent, BestTracker& best) {
    if (slice <= 0) return;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    ExtValue cur = sc.ratio(st.to_step(U, Ueff));
    ++spent;
    best.offer(cur, st.to_step(U, Ueff));
    double sig_b = 0.3, sig_v = 0.35;
    const double margin = 1e-9;
    size_t n = st.n();
    size_t ncoord = n > 1 ? 2 * n - 1 : 1;
    for (long step = 0; step + 1 < slice; ++step) {
        double xi = unit(rng);
        size_t idx = static_cast<size_t>(step) % ncoord;
        AscentState trial = st;
        bool is_break = idx < n;
        if (is_break) {
            size_t i = idx;
            double lo = i == 0 ? 0.0 : st.fracs[i - 1];
            double hi = i + 1 == n ? 1.0 : st.fracs[i + 1];
            double prop = st.fracs[i] + xi * sig_b * std::min(st.fracs[i] - lo, hi - st.fracs[i]);
            trial.fracs[i] = std::clamp(prop, lo + margin, hi - margin);
            if (!(trial.fracs[i] > lo && trial.fracs[i] < hi)) continue;
        } else {
            size_t i = idx - n + 1;
            double lo = i + 1 == n ? 0.0 : st.vals[i + 1];
            double hi = st.vals[i - 1];
            trial.vals[i] = std::clamp(st.vals[i] * std::exp(sig_v * xi), lo, hi);
        }
        ExtValue s = sc.ratio(trial.to_step(U, Ueff));
        ++spent;
        if (!s.is_inf() && s.value() > cur.value()) {
            st = trial;
            st.renorm();
            cur = s;
            best.offer(cur, st.to_step(U, Ueff));
            (is_break ? sig_b : sig_v) = std::min(1.0, (is_break ? sig_b : sig_v) * 1.25);
        } else {
            (is_break ? sig_b : sig_v) = std::max(1e-4, (is_break ? sig_b : sig_v) * 0.9);
        }
    }
}

}  // namespace

double inverse_primitive(const Primitive& U, double target) {
    const WeightSpec& base = U.base();
    double L = base.L();
    if (!(target > 0.0)) return 0.0;
    ExtValue UL = U.value_at_L();
    if (!UL.is_inf() && target >= UL.value()) return L;

    const auto& ps = base.pieces();
    if (!base.is_custom() && ps.size() == 1 && ps[0].anchor == Anchor::Zero &&
        ps[0].beta == 0.0) {
        double m = ps[0].alpha + 1.0;
        double t = std::pow(target * m / ps[0].c, 1.0 / m);
        return std::clamp(t, 0.0, L);
    }

    double lo = 0.0, hi;
    if (std::isfinite(L)) {
        hi = L;
    } else {
        hi = 1.0;
        while (U.eval(hi) < target && hi < 1e300) hi *= 4.0;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double Ux = U.eval(x);
        if (std::abs(Ux - target) <= 1e-15 * target) break;
        (Ux < target ? lo : hi) = x;
        if (hi - lo <= 4e-16 * hi) break;
        double next = 0.5 * (lo + hi);
        if (x > 0.0 && x < L) {
            double ux = 0.0;
            try {
                ux = base(x);
            } catch (const std::domain_error&) {
                ux = 0.0;
            }
            if (ux > 0.0) {
                double cand = x - (Ux - target) / ux;
                if (cand > lo && cand < hi) next = cand;
            }
        }
        x = next;
    }
    return x;
}

OracleResult oracle_lower_bound(const EmbeddingProblem& prob, const OracleOptions& opt) {
    if (opt.n_steps < 1 || opt.restarts < 1)
        throw std::invalid_argument("oracle: n_steps and restarts must be positive");
    OracleResult out;
    double L = prob.L();
    out.witness = indicator(std::isfinite(L) ? 0.5 * L : 1.0);
    if (prob.degenerate() || prob.weak_degenerate()) {
        out.C_lb = ExtValue(0.0);
        return out;
    }

    const Primitive& U = prob.U();
    bool weak = std::isinf(prob.p());
    double q = prob.q(), p = prob.p();

    // Phase 1: indicators chi_[0,t).  Their two norms are W(t)^{1/q} and the
    // fundamental function (weak or strong) to the power 1/p, both exact.
    auto ind_score = [&](double t) -> double {
        ExtValue num = ext_pow(ExtValue(prob.W().eval(t)), 1.0 / q);
        ExtValue den = weak ? prob.phi_weak(t) : ext_pow(prob.phi(t), 1.0 / p);
        ExtValue r = num / den;
        return r.is_inf() ? 0.0 : r.value();
    };
    std::vector<double> grid = make_log_grid(L, 256);
    const std::vector<double>& pg = prob.grid();
    for (size_t i = 0; i < pg.size(); i += 8) grid.push_back(pg[i]);
    std::sort(grid.begin(), grid.end());
    double best_t = grid[grid.size() / 2], best_s = -1.0;
    size_t best_k = 0;
    for (size_t k = 0; k < grid.size(); ++k) {
        double s = ind_score(grid[k]);
        if (s > best_s) { best_s = s; best_t = grid[k]; best_k = k; }
    }
    double lo = best_k > 0 ? grid[best_k - 1] : best_t * 0.25;
    double hi = best_k + 1 < grid.size() ? grid[best_k + 1] : std::min(L, best_t * 4.0);
    for (int round = 0; round < 3; ++round) {
        double step = (hi - lo) / 24.0;
        for (int i = 1; i < 24; ++i) {
            double t = lo + step * i;
            if (!(t > 0.0) || !(t < L)) continue;
            double s = ind_score(t);
            if (s > best_s) { best_s = s; best_t = t; }
        }
        lo = std::max(lo, best_t - step);
        hi = std::min(hi, best_t + step);
    }
    out.phase1_best = std::max(best_s, 0.0);

    BestTracker best;
    best.score = out.phase1_best;
    best.witness = indicator(best_t);

    // Phase 2: quantile-space coordinate ascent up a resolution ladder.
    Scorer sc(prob);
    ExtValue Ueff_e = U.value_at_L();
    double Ueff = Ueff_e.is_inf() ? U.eval(prob.grid().back()) : Ueff_e.value();
    double warm_frac = std::clamp(U.eval(best_t) / Ueff, 1e-6, 1.0 - 1e-6);

    std::vector<int> ladder;
    for (int nres = std::min(16, opt.n_steps); nres < opt.n_steps; nres = std::min(2 * nres, opt.n_steps))
        ladder.push_back(nres);
    ladder.push_back(opt.n_steps);

    long per_restart = opt.budget / opt.restarts;
    for (int r = 0; r < opt.restarts; ++r) {
        AscentState st;
        size_t n0 = static_cast<size_t>(ladder.front());
        if (r == 0) {
            for (size_t k = 0; k < n0; ++k) {
                st.fracs.push_back(warm_frac * double(k + 1) / double(n0));
                st.vals.push_back(1.0);
            }
        } else {
            std::mt19937_64 init_rng(mix(opt.seed, 0x100 + r));
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            std::vector<double> xs;
            for (size_t k = 0; k < n0; ++k)
                st.fracs.push_back((double(k) + 0.05 + 0.9 * u01(init_rng)) / double(n0));
            for (size_t k = 0; k < n0; ++k) xs.push_back(u01(init_rng));
            std::sort(xs.begin(), xs.end());
            for (double x : xs) st.vals.push_back(std::exp(-3.0 * x));
            st.renorm();
        }
        for (size_t lv = 0; lv < ladder.size(); ++lv) {
            if (st.n() != static_cast<size_t>(ladder[lv]))
                st = st.refined(static_cast<size_t>(ladder[lv]));
            std::mt19937_64 rng(mix(opt.seed, mix(0x200 + r, lv)));
            long slice = per_restart >> (lv + 1);
            ascend(st, sc, U, Ueff, rng, slice, out.evaluations, best);
        }
    }

    out.C_lb = ExtValue(best.score);
    out.witness = best.witness;
    return out;
}

ExtValue kernel_ratio(const StepFunction& h, const EmbeddingProblem& prob) {
    if (std::isinf(prob.p()))
        throw std::invalid_argument("kernel_ratio needs p < inf");
    if (prob.degenerate())
        throw std::invalid_argument("kernel_ratio needs a non-degenerate problem");
    if (h.breaks.size() != h.values.size())
        throw std::invalid_argument("kernel_ratio: malformed density");
    double L = prob.L();
    double prevb = 0.0;
    for (double b : h.breaks) {
        if (!(b > prevb) || !(b <= L))
            throw std::invalid_argument("kernel_ratio: density breaks must increase within (0, L]");
        prevb = b;
    }
    bool allzero = true;
    for (double c : h.values)
        if (c > 0.0) allzero = false;
    if (h.values.empty() || allzero) return ExtValue(0.0);

    double p = prob.p(), q = prob.q();
    const Primitive& U = prob.U();
    size_t J = h.breaks.size();
    auto piece_lo = [&](size_t j) { return j == 0 ? 0.0 : h.breaks[j - 1]; };

    // int_t^L h, exact.
    auto htail = [&](double t) {
        double s = 0.0;
        for (size_t j = 0; j < J; ++j) {
            double a = std::max(piece_lo(j), t), b = h.breaks[j];
            if (b > a) s += h.values[j] * (b - a);
        }
        return s;
    };

    QuadOptions inner_opt;
    inner_opt.rel_tol = 1e-8;
    inner_opt.abs_tol = 1e-14;
    auto kernel_avg = [&](double t) {
        double Ut = U.eval(std::min(t, L));
        double s = 0.0;
        for (size_t j = 0; j < J; ++j) {
            if (h.values[j] <= 0.0) continue;
            s += h.values[j] * integrate([&](double x) {
                                    double Ux = U.eval(x);
                                    return Ux / (Ux + Ut);
                                },
                                piece_lo(j), h.breaks[j], inner_opt)
                                   .value.value();
        }
        return s;
    };

    const WeightSpec& w = prob.w();
    const WeightSpec& v = prob.v();
    QuadOptions outer;
    outer.rel_tol = 1e-7;
    outer.abs_tol = 1e-13;

    ExtValue num_int(0.0);
    double prev = 0.0;
    for (size_t j = 0; j < J; ++j) {
        QuadOptions o = outer;
        o.singular_right = (h.breaks[j] >= L) && std::isfinite(L);
        num_int = num_int + integrate([&](double t) {
                                return std::pow(htail(t), q) * w(t);
                            },
                            prev, std::min(h.breaks[j], L), o)
                                .value;
        prev = h.breaks[j];
    }
    ExtValue num = ext_pow(num_int, 1.0 / q);
    if (num.is_zero()) return ExtValue(0.0);

    QuadOptions od = outer;
    od.singular_right = std::isfinite(L);
    ExtValue den_int = integrate([&](double t) {
                           return std::pow(kernel_avg(t), p) * v(t);
                       },
                       0.0, L, od)
                           .value;
    return num / ext_pow(den_int, 1.0 / p);
}

EmbeddingProblem reduce_to_unit_u(const EmbeddingProblem& prob) {
    const Primitive& U = prob.U();
    ExtValue UL = U.value_at_L();
    double Lnew = UL.is_inf() ? kInf : UL.value();
    WeightSpec u_new = WeightSpec::power(1.0, 0.0, Lnew);

    const WeightSpec& uw = prob.u();
    bool u_power = !uw.is_custom() && uw.pieces().size() == 1 &&
                   uw.pieces()[0].anchor == Anchor::Zero && uw.pieces()[0].beta == 0.0;

    auto symbolic_ok = [&](const WeightSpec& s) {
        if (!u_power || s.is_custom()) return false;
        for (const auto& pc : s.pieces())
            if (pc.anchor != Anchor::Zero || pc.beta != 0.0) return false;
        return true;
    };

    auto transform = [&](const WeightSpec& s, const Primitive& P) -> WeightSpec {
        if (symbolic_ok(s)) {
            double m = uw.pieces()[0].alpha + 1.0;
            double K = uw.pieces()[0].c / m;
            std::vector<WeightPiece> out;
            double edge = 0.0;
            for (const auto& pc : s.pieces()) {
                WeightPiece np;
                np.anchor = Anchor::Zero;
                np.lo = edge;
                edge = (pc.hi >= s.L()) ? Lnew : K * std::pow(pc.hi, m);
                np.hi = edge;
                np.alpha = (pc.alpha + 1.0) / m - 1.0;
                np.beta = 0.0;
                np.c = pc.c / m * std::pow(K, -(pc.alpha + 1.0) / m);
                out.push_back(np);
            }
            return WeightSpec::piecewise(std::move(out), Lnew);
        }
        double L = prob.L();
        Primitive Uc = U;  // shared-state copies keep the closures self-contained
        auto inv = [Uc, L](double s2) {
            double t = inverse_primitive(Uc, s2);
            if (!(t > 0.0)) t = std::nextafter(0.0, 1.0);
            if (std::isfinite(L) && !(t < L)) t = std::nextafter(L, 0.0);
            return t;
        };
        WeightSpec su = uw;
        WeightSpec sv = s;
        Primitive Pc = P;
        return WeightSpec::custom(
            [sv, su, inv](double s2) {
                double t = inv(s2);
                return sv(t) / su(t);
            },
            Lnew, true,
            [Pc, inv](double s2) { return Pc.eval(inv(s2)); });
    };

    WeightSpec v_new = transform(prob.v(), prob.V());
    WeightSpec w_new = transform(prob.w(), prob.W());
    return EmbeddingProblem(std::move(u_new), std::move(v_new), std::move(w_new),
                            prob.p(), prob.q());
}

}  // namespace lorembed
