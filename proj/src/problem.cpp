#include "problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"

namespace lorembed {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Shared cache grid: geometric clustering into both endpoints (12 decades),
// fine enough that per-cell refinement needs only a midpoint sample.
std::vector<double> build_grid(double L) {
    const int H = 1024;
    std::vector<double> g;
    if (std::isinf(L)) {
        g.reserve(2 * H);
        for (int j = 0; j < 2 * H; ++j)
            g.push_back(std::pow(10.0, -12.0 + 24.0 * j / (2.0 * H - 1.0)));
    } else {
        g.reserve(2 * H - 1);
        for (int j = 0; j < H; ++j)
            g.push_back(0.5 * L * std::pow(2e-12, (H - 1.0 - j) / (H - 1.0)));
        for (int j = 1; j < H; ++j)
            g.push_back(L - 0.5 * L * std::pow(2e-12, j / (H - 1.0)));
    }
    return g;
}

double interior_midpoint(double L) { return std::isinf(L) ? 1.0 : 0.5 * L; }

using ExtFn = std::function<ExtValue(double)>;

// sup of val over [g[i], L) for every grid point, right to left; the region
// beyond the last grid point is covered by approach samples toward L.
std::vector<ExtValue> build_envelope(const std::vector<double>& g, double L, const ExtFn& val) {
    const size_t n = g.size();
    std::vector<ExtValue> env(n);
    ExtValue tail_sup(0.0);
    if (std::isinf(L)) {
        for (double t = g.back() * 10.0; t <= 1e26; t *= 100.0)
            tail_sup = std::max(tail_sup, val(t));
    } else {
        double gap = L - g.back();
        for (int j = 1; j <= 8; ++j)
            tail_sup = std::max(tail_sup, val(L - gap * std::pow(0.25, j)));
    }
    env[n - 1] = std::max(val(g[n - 1]), tail_sup);
    for (size_t i = n - 1; i-- > 0;) {
        double mid = std::sqrt(g[i] * g[i + 1]);
        env[i] = std::max({val(g[i]), val(mid), env[i + 1]});
    }
    return env;
}

// sup of val over [t, L) from a precomputed envelope plus local samples for
// the partial cell; exact up to grid resolution.
ExtValue envelope_query(const std::vector<double>& g, const std::vector<ExtValue>& env, double L,
                        const ExtFn& val, double t) {
    ExtValue best = val(t);
    auto it = std::lower_bound(g.begin(), g.end(), t);
    if (it != g.end()) {
        size_t k = static_cast<size_t>(it - g.begin());
        best = std::max(best, env[k]);
        if (g[k] > t) best = std::max(best, val(std::sqrt(t * g[k])));
    } else if (std::isinf(L)) {
        for (double s = t * 10.0; s <= 1e26; s *= 100.0) best = std::max(best, val(s));
    } else {
        double gap = L - t;
        for (int j = 1; j <= 8; ++j) {
            double s = L - gap * std::pow(0.25, j);
            if (!(s < L)) break;  // rounded onto the open endpoint
            best = std::max(best, val(s));
        }
    }
    return best;
}

}  // namespace

struct EmbeddingProblem::Impl {
    WeightSpec uw, vw, ww;
    Primitive Up, Vp, Wp;
    double p, q, r = 0.0, L;
    CaseTag tag = CaseTag::I;
    bool degenerate = false;
    bool weak_deg = false;
    std::vector<double> grid;
    std::vector<ExtValue> envA2, envWq;  // case II / weak q >= 1 sup caches
    std::vector<ExtValue> preV, sufVU;   // running sups of v and v/U (p = inf)

    Impl(WeightSpec u_, WeightSpec v_, WeightSpec w_, double p_, double q_)
        : uw(std::move(u_)),
          vw(std::move(v_)),
          ww(std::move(w_)),
          Up(primitive(uw)),
          Vp(primitive(vw)),
          Wp(primitive(ww)),
          p(p_),
          q(q_),
          L(uw.L()) {
        if (!is_admissible(Up))
            throw std::domain_error("u must be admissible: a.e. positive with strictly "
                                    "increasing running integral");
        grid = build_grid(L);
        if (!std::isinf(p) && p > q) r = p * q / (p - q);

        if (std::isinf(p)) {
            tag = q >= 1.0 ? CaseTag::WeakGe1 : CaseTag::WeakLt1;
            build_weak_caches();
            weak_deg = phi_weak_at(interior_midpoint(L)).is_inf() || weak_endpoint_blowup();
            if (tag == CaseTag::WeakGe1) {
                envWq = build_envelope(grid, L, [this](double s) {
                    return ExtValue(Wp.eval(s)) / ext_pow(ExtValue(Up.eval(s)), q);
                });
            }
        } else {
            degenerate = tail_integral(vw, Up, p, interior_midpoint(L)).is_inf();
            if (degenerate) {
                tag = CaseTag::Degenerate;
            } else if (q >= 1.0 && p <= q) {
                tag = CaseTag::I;
            } else if (q >= 1.0) {
                tag = CaseTag::II;
            } else if (p <= q) {
                tag = CaseTag::III;
            } else {
                tag = CaseTag::IV;
            }
            if (tag == CaseTag::II) {
                envA2 = build_envelope(grid, L, [this](double s) {
                    return ext_pow(ExtValue(Up.eval(s)), -r) *
                           ext_pow(ExtValue(Wp.eval(s)), p / (p - q));
                });
            }
        }
    }

    void build_weak_caches() {
        const size_t n = grid.size();
        preV.resize(n);
        sufVU.resize(n);
        ExtValue run(0.0);
        for (int j = 8; j >= 1; --j)
            run = std::max(run, ExtValue(vw(grid[0] * std::pow(0.25, j))));
        preV[0] = std::max(run, ExtValue(vw(grid[0])));
        for (size_t j = 1; j < n; ++j) {
            double mid = std::sqrt(grid[j - 1] * grid[j]);
            preV[j] = std::max({preV[j - 1], ExtValue(vw(mid)), ExtValue(vw(grid[j]))});
        }
        auto vU = [this](double s) { return ExtValue(vw(s)) / ExtValue(Up.eval(s)); };
        ExtValue tail_sup(0.0);
        if (std::isinf(L)) {
            for (double s = grid.back() * 10.0; s <= 1e26; s *= 100.0)
                tail_sup = std::max(tail_sup, vU(s));
        } else {
            double gap = L - grid.back();
            for (int j = 1; j <= 8; ++j) {
                double s = L - gap * std::pow(0.25, j);
                if (!(s < L)) break;  // rounded onto the open endpoint
                tail_sup = std::max(tail_sup, vU(s));
            }
        }
        sufVU[n - 1] = std::max(vU(grid[n - 1]), tail_sup);
        for (size_t j = n - 1; j-- > 0;) {
            double mid = std::sqrt(grid[j] * grid[j + 1]);
            sufVU[j] = std::max({vU(grid[j]), vU(mid), sufVU[j + 1]});
        }
    }

    ExtValue phi_weak_at(double t) const {
        // split at s = t: left branch sup v, right branch U(t) * sup v/U
        ExtValue Ml(vw(t));
        ExtValue Mr = ExtValue(vw(t)) / ExtValue(Up.eval(t));
        auto it = std::upper_bound(grid.begin(), grid.end(), t);
        if (it != grid.begin()) {
            size_t k = static_cast<size_t>(it - grid.begin()) - 1;
            Ml = std::max(Ml, preV[k]);
            if (grid[k] < t) Ml = std::max(Ml, ExtValue(vw(std::sqrt(grid[k] * t))));
        } else {
            for (int j = 1; j <= 8; ++j)
                Ml = std::max(Ml, ExtValue(vw(t * std::pow(0.25, j))));
        }
        if (it != grid.end()) {
            size_t k = static_cast<size_t>(it - grid.begin());
            sufVU_partial(t, grid[k], Mr);
            Mr = std::max(Mr, sufVU[k]);
        } else if (std::isinf(L)) {
            for (double s = t * 10.0; s <= 1e26; s *= 100.0)
                Mr = std::max(Mr, ExtValue(vw(s)) / ExtValue(Up.eval(s)));
        } else {
            double gap = L - t;
            for (int j = 1; j <= 8; ++j) {
                double s = L - gap * std::pow(0.25, j);
                if (!(s < L)) break;  // rounded onto the open endpoint
                Mr = std::max(Mr, ExtValue(vw(s)) / ExtValue(Up.eval(s)));
            }
        }
        return std::max(Ml, ExtValue(Up.eval(t)) * Mr);
    }

    void sufVU_partial(double lo, double hi, ExtValue& acc) const {
        if (hi <= lo) return;
        double mid = std::sqrt(lo * hi);
        acc = std::max(acc, ExtValue(vw(mid)) / ExtValue(Up.eval(mid)));
    }

    // The cached sups sample the open interval, so a blowup sitting exactly
    // at an endpoint (v unbounded near 0, or v/U unbounded near L) can look
    // like a large finite value.  Power/log pieces are classified exactly
    // from their exponents; custom densities fall back to limit probes.
    bool weak_endpoint_blowup() const {
        const double eul = std::exp(1.0);
        if (vw.is_custom()) return probe_v_blowup() || probe_ratio_blowup();
        const WeightPiece& fp = vw.pieces().front();
        if (fp.anchor == Anchor::Zero &&
            (fp.alpha < 0.0 || (fp.alpha == 0.0 && fp.beta > 0.0)))
            return true;  // sup over s <= t of v is inf for every t
        const WeightPiece& bp = vw.pieces().back();
        if (!std::isinf(L)) {
            if (bp.anchor == Anchor::End &&
                (bp.alpha < 0.0 || (bp.alpha == 0.0 && bp.beta > 0.0)))
                return true;  // v/U -> inf at L (U(L) stays finite)
            if (bp.anchor == Anchor::Zero && bp.beta < 0.0 && !(bp.hi < eul))
                return true;  // log(e/t)^beta pole right at the endpoint
            return false;
        }
        if (uw.is_custom()) return probe_ratio_blowup();
        // Tail pieces on (0, inf) are zero-anchored pure powers: U grows
        // like t^{alpha_u + 1} (log t at alpha_u = -1, bounded below that),
        // so v/U diverges exactly when alpha_v exceeds that growth.
        double gu = std::max(uw.pieces().back().alpha + 1.0, 0.0);
        return bp.alpha > gu;
    }

    bool probe_v_blowup() const {
        try {
            return limit_at_endpoint([this](double s) { return vw(s); }, Endpoint::Zero, L)
                .is_inf();
        } catch (const EvalError&) {
            return false;  // no sustained trend: treat as bounded
        }
    }

    bool probe_ratio_blowup() const {
        try {
            return limit_at_endpoint([this](double s) { return vw(s) / Up.eval(s); },
                                     Endpoint::End, L)
                .is_inf();
        } catch (const EvalError&) {
            return false;
        }
    }
};

EmbeddingProblem::EmbeddingProblem(WeightSpec u, WeightSpec v, WeightSpec w, double p, double q) {
    if (std::isnan(q) || !(q > 0.0) || std::isinf(q))
        throw std::invalid_argument("q must be finite and positive");
    if (std::isnan(p) || !(p > 0.0))
        throw std::invalid_argument("p must be positive (inf allowed)");
    if (u.L() != v.L() || u.L() != w.L())
        throw std::invalid_argument("u, v, w must share the same interval length");
    impl_ = std::make_shared<const Impl>(std::move(u), std::move(v), std::move(w), p, q);
}

double EmbeddingProblem::p() const { return impl_->p; }
double EmbeddingProblem::q() const { return impl_->q; }
double EmbeddingProblem::L() const { return impl_->L; }
CaseTag EmbeddingProblem::tag() const { return impl_->tag; }
bool EmbeddingProblem::degenerate() const { return impl_->degenerate; }
bool EmbeddingProblem::weak_degenerate() const { return impl_->weak_deg; }

double EmbeddingProblem::r() const {
    if (std::isinf(impl_->p) || !(impl_->p > impl_->q))
        throw std::logic_error("r = pq/(p-q) needs q < p < inf");
    return impl_->r;
}

const WeightSpec& EmbeddingProblem::u() const { return impl_->uw; }
const WeightSpec& EmbeddingProblem::v() const { return impl_->vw; }
const WeightSpec& EmbeddingProblem::w() const { return impl_->ww; }
const Primitive& EmbeddingProblem::U() const { return impl_->Up; }
const Primitive& EmbeddingProblem::V() const { return impl_->Vp; }
const Primitive& EmbeddingProblem::W() const { return impl_->Wp; }
ExtValue EmbeddingProblem::W_at_L() const { return impl_->Wp.value_at_L(); }
const std::vector<double>& EmbeddingProblem::grid() const { return impl_->grid; }

ExtValue EmbeddingProblem::tail(double t) const {
    if (std::isinf(impl_->p)) throw std::logic_error("tail requires p < inf");
    return tail_integral(impl_->vw, impl_->Up, impl_->p, t);
}

ExtValue EmbeddingProblem::phi(double t) const {
    if (std::isinf(impl_->p)) throw std::logic_error("phi requires p < inf; see phi_weak");
    return ExtValue(impl_->Vp.eval(t)) +
           ext_pow(ExtValue(impl_->Up.eval(t)), impl_->p) * tail(t);
}

ExtValue EmbeddingProblem::wtail(double t) const {
    const double q = impl_->q;
    if (!(q < 1.0)) throw std::logic_error("wtail is defined for q < 1");
    if (!(t < impl_->L)) return ExtValue(0.0);  // empty tail at t = L
    const double c = q / (1.0 - q);
    const Impl& im = *impl_;
    auto integrand = [&im, c](double s) {
        ExtValue g = ext_pow(ExtValue(im.Wp.eval(s)), c) * ExtValue(im.ww(s)) *
                     ext_pow(ExtValue(im.Up.eval(s)), -c);
        return g.is_inf() ? kInf : g.value();
    };
    QuadOptions opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-14;
    opt.singular_right = !std::isinf(impl_->L);
    QuadResult qr = integrate(integrand, t, impl_->L, opt);
    return qr.value;
}

ExtValue EmbeddingProblem::envelope_supA2(double t) const {
    if (impl_->envA2.empty())
        throw std::logic_error("the U^-r W^(p/(p-q)) envelope exists only in case II");
    const Impl& im = *impl_;
    auto val = [&im](double s) {
        return ext_pow(ExtValue(im.Up.eval(s)), -im.r) *
               ext_pow(ExtValue(im.Wp.eval(s)), im.p / (im.p - im.q));
    };
    return envelope_query(im.grid, im.envA2, im.L, val, t);
}

ExtValue EmbeddingProblem::envelope_supWq(double t) const {
    if (impl_->envWq.empty())
        throw std::logic_error("the W/U^q envelope exists only for p = inf, q >= 1");
    const Impl& im = *impl_;
    auto val = [&im](double s) {
        return ExtValue(im.Wp.eval(s)) / ext_pow(ExtValue(im.Up.eval(s)), im.q);
    };
    return envelope_query(im.grid, im.envWq, im.L, val, t);
}

ExtValue EmbeddingProblem::phi_weak(double t) const {
    if (!std::isinf(impl_->p)) throw std::logic_error("phi_weak requires p = inf");
    if (impl_->weak_deg) return ExtValue::infinity();  // blowup may sit at an endpoint
    return impl_->phi_weak_at(t);
}

const char* case_name(CaseTag tag) {
    switch (tag) {
        case CaseTag::I: return "I";
        case CaseTag::II: return "II";
        case CaseTag::III: return "III";
        case CaseTag::IV: return "IV";
        case CaseTag::WeakGe1: return "WEAK_GE1";
        case CaseTag::WeakLt1: return "WEAK_LT1";
        case CaseTag::Degenerate: return "DEGENERATE";
    }
    return "?";
}

CaseTag classify(const EmbeddingProblem& prob) { return prob.tag(); }

ExtValue fundamental_phi(const EmbeddingProblem& prob, double t) { return prob.phi(t); }

}  // namespace lorembed
