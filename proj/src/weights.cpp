#include "weights.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "quadrature.hpp"
#include "weights_json.hpp"

namespace lorembed {

namespace {

constexpr double kE = 2.718281828459045235;
constexpr double kInf = std::numeric_limits<double>::infinity();

double piece_density(const WeightPiece& p, double L, double t) {
    if (p.c == 0.0) return 0.0;
    double x = p.anchor == Anchor::Zero ? t : L - t;
    double shape = std::pow(x, p.alpha);
    if (p.beta != 0.0) {
        double lg = p.anchor == Anchor::Zero ? std::log(kE / t) : std::log(kE * L / (L - t));
        shape *= std::pow(lg, p.beta);
    }
    return p.c * shape;
}

bool shape_closed(double alpha, double beta) {
    return beta == 0.0 || alpha == -1.0 || beta == 1.0;
}

// Antiderivative (in s) of s^alpha * log(C/s)^beta for the closed cases,
// valid while log(C/s) >= 0.  The coefficient is NOT folded in: callers
// multiply by c last, which keeps rescaled weights exact.
double shape_F(double alpha, double beta, double C, double s) {
    if (beta == 0.0) {
        if (alpha == -1.0) return std::log(s);
        return std::pow(s, alpha + 1.0) / (alpha + 1.0);
    }
    double lg = std::log(C / s);
    if (alpha == -1.0) {
        if (beta == -1.0) return -std::log(lg);
        return -std::pow(lg, beta + 1.0) / (beta + 1.0);
    }
    double a1 = alpha + 1.0;  // beta == 1
    return std::pow(s, a1) / a1 * (lg + 1.0 / a1);
}

// lim_{s->0+} of the antiderivative; divergent means the integral from 0 is
// infinite (the limit itself is 0 in every convergent case).
bool shape_diverges_at_zero(double alpha, double beta) {
    if (alpha > -1.0) return false;
    if (alpha == -1.0) return beta >= -1.0;
    return true;
}

// Whether int^inf s^alpha ds diverges (only beta == 0 pieces can reach inf).
bool shape_diverges_at_inf(double alpha) { return alpha >= -1.0; }

}  // namespace

WeightSpec WeightSpec::piecewise(std::vector<WeightPiece> pieces, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("weight domain needs L > 0");
    if (pieces.empty()) throw std::invalid_argument("weight needs at least one piece");
    double prev = 0.0;
    for (const WeightPiece& p : pieces) {
        if (p.lo != prev) throw std::invalid_argument("weight pieces must tile (0, L) contiguously");
        if (!(p.hi > p.lo)) throw std::invalid_argument("weight piece has empty interval");
        if (!(p.c >= 0.0)) throw std::invalid_argument("weight piece has negative coefficient");
        if (p.anchor == Anchor::End && std::isinf(L))
            throw std::invalid_argument("end-anchored piece needs finite L");
        if (p.anchor == Anchor::Zero && p.beta != 0.0 && !(p.hi <= kE))
            throw std::invalid_argument("zero-anchored log piece must end by t = e");
        prev = p.hi;
    }
    if (prev != L) throw std::invalid_argument("weight pieces must end at L");
    WeightSpec w;
    w.L_ = L;
    w.pieces_ = std::move(pieces);
    return w;
}

WeightSpec WeightSpec::power(double c, double alpha, double L) {
    return piecewise({WeightPiece{0.0, L, Anchor::Zero, c, alpha, 0.0}}, L);
}
WeightSpec WeightSpec::powerlog(double c, double alpha, double beta, double L) {
    return piecewise({WeightPiece{0.0, L, Anchor::Zero, c, alpha, beta}}, L);
}
WeightSpec WeightSpec::end_power(double c, double alpha, double L) {
    return piecewise({WeightPiece{0.0, L, Anchor::End, c, alpha, 0.0}}, L);
}
WeightSpec WeightSpec::end_powerlog(double c, double alpha, double beta, double L) {
    return piecewise({WeightPiece{0.0, L, Anchor::End, c, alpha, beta}}, L);
}

WeightSpec WeightSpec::custom(std::function<double(double)> density, double L,
                              bool locally_integrable,
                              std::function<double(double)> primitive_hint) {
    if (!(L > 0.0)) throw std::invalid_argument("weight domain needs L > 0");
    if (!density) throw std::invalid_argument("custom weight needs a density");
    WeightSpec w;
    w.L_ = L;
    w.density_ = std::move(density);
    w.hint_ = std::move(primitive_hint);
    w.custom_integrable_ = locally_integrable;
    return w;
}

double WeightSpec::operator()(double t) const {
    if (!(t > 0.0) || !(t < L_)) throw std::domain_error("weight evaluated outside (0, L)");
    if (density_) return density_(t);
    // right-limit convention: a boundary point belongs to the piece on its right
    size_t i = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                                [](double tt, const WeightPiece& p) { return tt < p.lo; }) -
               pieces_.begin();
    return piece_density(pieces_[i - 1], L_, t);
}

// ---------------------------------------------------------------------------

struct Primitive::Impl {
    explicit Impl(WeightSpec ws) : w(std::move(ws)) {}

    WeightSpec w;
    bool custom = false;
    bool closed_form = true;
    ExtValue at_L;

    struct PP {
        WeightPiece wp;
        int kind;    // 0 closed zero-anchored, 1 closed end-anchored, 2 numeric
        double C;    // log-argument constant (e, or e*L for end-anchored)
        double ref;  // kind 0: shape_F at lo (0 when lo touches 0); kind 1: shape_F at L-lo
        double mass;
        double prefix;
    };
    std::vector<PP> ps;

    std::function<double(double)> hint;
    mutable std::mutex memo_mu;
    mutable std::map<double, double> memo;

    double piece_partial(const PP& p, double t) const {
        if (t <= p.wp.lo) return 0.0;
        if (p.kind == 0) return p.wp.c * (shape_F(p.wp.alpha, p.wp.beta, p.C, t) - p.ref);
        if (p.kind == 1) return p.wp.c * (p.ref - shape_F(p.wp.alpha, p.wp.beta, p.C, w.L() - t));
        QuadOptions opt;
        opt.singular_left = p.wp.lo == 0.0;
        WeightPiece wp = p.wp;
        double L = w.L();
        QuadResult r = integrate([wp, L](double s) { return piece_density(wp, L, s); },
                                 p.wp.lo, t, opt);
        return r.value.is_inf() ? kInf : r.value.value();
    }

    const PP& piece_at(double t) const {
        size_t i = std::upper_bound(ps.begin(), ps.end(), t,
                                    [](double tt, const PP& p) { return tt < p.wp.lo; }) -
                   ps.begin();
        return ps[i - 1];
    }

    double eval_custom(double t) const {
        if (hint) return hint(t);
        {
            std::lock_guard<std::mutex> lk(memo_mu);
            auto it = memo.find(t);
            if (it != memo.end()) return it->second;
        }
        QuadOptions opt;
        opt.singular_left = true;
        QuadResult r = integrate(w, 0.0, t, opt);
        if (r.value.is_inf()) throw EvalError("not a weight: V(t) is infinite", t);
        double val = r.value.value();
        std::lock_guard<std::mutex> lk(memo_mu);
        memo.emplace(t, val);
        return val;
    }

    double eval(double t) const {
        double L = w.L();
        if (t == 0.0) return 0.0;
        if (!(t > 0.0) || !(t <= L)) throw std::domain_error("primitive evaluated outside [0, L]");
        if (t == L) {
            if (at_L.is_inf()) throw EvalError("V(L) is infinite", t);
            return at_L.value();
        }
        if (custom) return eval_custom(t);
        const PP& p = piece_at(t);
        return p.prefix + piece_partial(p, t);
    }

    double between(double a, double b) const {
        if (!(a <= b)) throw std::domain_error("between() needs a <= b");
        if (a == b) return 0.0;
        double L = w.L();
        if (!(a >= 0.0) || !(b <= L)) throw std::domain_error("between() outside [0, L]");
        if (custom || b == L) return std::max(0.0, eval(b) - eval(a));
        const PP& pa = a == 0.0 ? ps.front() : piece_at(a);
        const PP& pb = piece_at(b);
        if (&pa == &pb) return std::max(0.0, piece_partial(pb, b) - piece_partial(pa, a));
        double sum = pa.mass - piece_partial(pa, a);
        for (const PP* p = &pa + 1; p < &pb; ++p) sum += p->mass;
        return std::max(0.0, sum + piece_partial(pb, b));
    }
};

Primitive primitive(const WeightSpec& w) {
    auto impl = std::make_shared<Primitive::Impl>(w);
    const double L = w.L();

    if (w.is_custom()) {
        impl->custom = true;
        impl->hint = w.primitive_hint();
        impl->closed_form = static_cast<bool>(impl->hint);
        if (!w.integrability_asserted())
            throw std::domain_error("not a weight: density asserted non-integrable");
        QuadOptions opt;
        opt.singular_left = true;
        opt.singular_right = true;
        impl->at_L = integrate(w, 0.0, L, opt).value;
        Primitive P;
        P.impl_ = impl;
        // numeric spot check of 0 < V(t) < inf
        const std::array<double, 4> probes =
            std::isinf(L) ? std::array<double, 4>{0.1, 1.0, 10.0, 100.0}
                          : std::array<double, 4>{L / 16, L / 8, L / 4, L / 2};
        for (double t : probes) {
            double V = impl->eval(t);
            if (!(V > 0.0) || std::isinf(V))
                throw std::domain_error("not a weight: V(t) must be positive and finite");
        }
        return P;
    }

    double acc = 0.0;
    const auto& pieces = w.pieces();
    for (size_t i = 0; i < pieces.size(); ++i) {
        const WeightPiece& wp = pieces[i];
        Primitive::Impl::PP p;
        p.wp = wp;
        p.prefix = acc;
        bool closed = shape_closed(wp.alpha, wp.beta);
        if (!closed) {
            p.kind = 2;
            p.C = 0.0;
            p.ref = 0.0;
            impl->closed_form = false;
            QuadOptions opt;
            opt.singular_left = wp.lo == 0.0;
            opt.singular_right = wp.anchor == Anchor::End && wp.hi == L;
            double Lc = L;
            QuadResult r = integrate([wp, Lc](double s) { return piece_density(wp, Lc, s); },
                                     wp.lo, wp.hi, opt);
            p.mass = r.value.is_inf() ? kInf : r.value.value();
        } else if (wp.anchor == Anchor::Zero) {
            p.kind = 0;
            p.C = kE;
            double Fhi;
            if (wp.lo == 0.0) {
                if (wp.c > 0.0 && shape_diverges_at_zero(wp.alpha, wp.beta))
                    throw std::domain_error("not a weight: V(t) = infinity on the interior");
                p.ref = 0.0;
            } else {
                p.ref = shape_F(wp.alpha, wp.beta, p.C, wp.lo);
            }
            if (std::isinf(wp.hi))
                Fhi = shape_diverges_at_inf(wp.alpha) ? kInf : 0.0;
            else
                Fhi = shape_F(wp.alpha, wp.beta, p.C, wp.hi);
            p.mass = wp.c == 0.0 ? 0.0 : wp.c * (Fhi - p.ref);
        } else {
            p.kind = 1;
            p.C = kE * L;
            p.ref = shape_F(wp.alpha, wp.beta, p.C, L - wp.lo);
            double Fsmall = wp.hi == L
                                ? (wp.c > 0.0 && shape_diverges_at_zero(wp.alpha, wp.beta)
                                       ? -kInf
                                       : 0.0)
                                : shape_F(wp.alpha, wp.beta, p.C, L - wp.hi);
            p.mass = wp.c == 0.0 ? 0.0 : wp.c * (p.ref - Fsmall);
        }
        if (std::isinf(p.mass) && i + 1 < pieces.size())
            throw std::domain_error("not a weight: V(t) = infinity on the interior");
        if (i == 0 && p.mass == 0.0)
            throw std::domain_error("not a weight: V(t) vanishes near 0");
        impl->ps.push_back(p);
        acc += p.mass;
    }
    impl->at_L = std::isinf(acc) ? ExtValue::infinity() : ExtValue(acc);

    Primitive P;
    P.impl_ = impl;
    return P;
}

const WeightSpec& Primitive::base() const { return impl_->w; }
double Primitive::eval(double t) const { return impl_->eval(t); }
double Primitive::between(double a, double b) const { return impl_->between(a, b); }
ExtValue Primitive::value_at_L() const { return impl_->at_L; }
bool Primitive::closed_form_available() const { return impl_->closed_form; }

bool Primitive::matches_quadrature(double rel_tol, int points) const {
    const double L = impl_->w.L();
    QuadOptions opt;
    opt.singular_left = true;
    opt.rel_tol = std::min(rel_tol / 4.0, 1e-11);
    opt.abs_tol = 1e-15;
    for (int i = 1; i <= points; ++i) {
        double t;
        if (std::isinf(L))
            t = 1e-3 * std::pow(1e6, (i - 1) / double(points - 1));
        else
            t = L * i / (points + 1.0);
        QuadResult r = integrate(impl_->w, 0.0, t, opt);
        if (r.value.is_inf()) return false;
        double V = eval(t);
        if (std::fabs(V - r.value.value()) > rel_tol * std::max(1.0, std::fabs(V)))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

ExtValue tail_integral(const WeightSpec& v, const Primitive& U, double p, double t) {
    const double L = v.L();
    if (!(p > 0.0)) throw std::domain_error("tail_integral needs p > 0");
    if (U.base().L() != L) throw std::domain_error("tail_integral: mismatched domains");
    if (t >= L) return ExtValue(0.0);
    if (!(t > 0.0)) throw std::domain_error("tail_integral needs t in (0, L)");

    const WeightSpec& u = U.base();
    bool v_pure = !v.is_custom() && v.pieces().size() == 1 &&
                  v.pieces()[0].anchor == Anchor::Zero && v.pieces()[0].beta == 0.0;
    bool u_pure = !u.is_custom() && u.pieces().size() == 1 &&
                  u.pieces()[0].anchor == Anchor::Zero && u.pieces()[0].beta == 0.0 &&
                  u.pieces()[0].c > 0.0;
    if (v_pure && u_pure) {
        // U(s) = CU * s^gamma exactly, so the integrand is one pure power
        double gamma = u.pieces()[0].alpha + 1.0;
        double CU = u.pieces()[0].c / gamma;
        double cv = v.pieces()[0].c;
        if (cv == 0.0) return ExtValue(0.0);
        double m = v.pieces()[0].alpha - p * gamma;
        ExtValue k = ExtValue(cv) * ExtValue(std::pow(CU, -p));
        if (std::isinf(L)) {
            if (m >= -1.0) return ExtValue::infinity();
            return k * ExtValue(std::pow(t, m + 1.0) / (-(m + 1.0)));
        }
        if (m == -1.0) return k * ExtValue(std::log(L / t));
        return k * ExtValue((std::pow(L, m + 1.0) - std::pow(t, m + 1.0)) / (m + 1.0));
    }

    // int_t^L v = inf while U(L) < inf forces divergence (U^{-p} >= U(L)^{-p} > 0)
    if (!v.is_custom()) {
        try {
            if (primitive(v).value_at_L().is_inf() && !U.value_at_L().is_inf())
                return ExtValue::infinity();
        } catch (const std::exception&) {
            // v not a valid weight on its own terms; let quadrature decide
        }
    }

    QuadOptions opt;
    opt.singular_right = true;
    QuadResult r = integrate([&](double s) { return v(s) * std::pow(U.eval(s), -p); }, t, L, opt);
    return r.value;
}

bool is_admissible(const Primitive& U) {
    const WeightSpec& u = U.base();
    if (!u.is_custom()) {
        for (const WeightPiece& p : u.pieces())
            if (!(p.c > 0.0)) return false;
    }
    const double L = u.L();
    try {
        double prev = -1.0;
        for (int i = 1; i <= 64; ++i) {
            double t = std::isinf(L) ? 1e-6 * std::pow(1e12, (i - 1) / 63.0) : L * i / 65.0;
            double cur = U.eval(t);
            if (std::isinf(cur) || !(cur > prev)) return false;
            prev = cur;
        }
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

std::pair<double, double> sobolev_exponents(double p, double q, int m, int n, double d) {
    if (!(p > 0.0) || !(q > 0.0)) throw std::domain_error("sobolev_exponents: need p, q > 0");
    if (m < 1 || !(m < n)) throw std::domain_error("sobolev_exponents: need 1 <= m < n");
    if (!(d > 0.0) || !(d < double(n - m)))
        throw std::domain_error("sobolev_exponents: need 0 < d < n - m");
    double s = double(m) / (double(n) - d);
    return {p * s, q * s};
}

// ---------------------------------------------------------------------------

namespace {

WeightPiece single_piece_from_json(const nlohmann::json& j, double lo, double hi) {
    const std::string type = j.at("type").get<std::string>();
    WeightPiece p;
    p.lo = lo;
    p.hi = hi;
    p.c = j.value("c", 1.0);
    p.alpha = j.value("alpha", 0.0);
    p.beta = j.value("beta", 0.0);
    if (type == "power" || type == "powerlog") {
        p.anchor = Anchor::Zero;
    } else if (type == "endpower" || type == "endpowerlog") {
        p.anchor = Anchor::End;
    } else {
        throw std::invalid_argument("unknown weight type: " + type);
    }
    if ((type == "power" || type == "endpower") && p.beta != 0.0)
        throw std::invalid_argument("weight type \"" + type + "\" does not take beta");
    return p;
}

nlohmann::json piece_to_json(const WeightPiece& p) {
    nlohmann::json j;
    bool end = p.anchor == Anchor::End;
    j["type"] = end ? (p.beta == 0.0 ? "endpower" : "endpowerlog")
                    : (p.beta == 0.0 ? "power" : "powerlog");
    j["c"] = p.c;
    j["alpha"] = p.alpha;
    if (p.beta != 0.0) j["beta"] = p.beta;
    return j;
}

}  // namespace

WeightSpec weight_from_json(const nlohmann::json& j, double L) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "piecewise") {
        auto breaks = j.at("breaks").get<std::vector<double>>();
        const nlohmann::json& pj = j.at("pieces");
        if (pj.size() != breaks.size() + 1)
            throw std::invalid_argument("piecewise weight needs breaks.size() + 1 pieces");
        std::vector<WeightPiece> ps;
        double lo = 0.0;
        for (size_t i = 0; i < pj.size(); ++i) {
            double hi = i < breaks.size() ? breaks[i] : L;
            ps.push_back(single_piece_from_json(pj[i], lo, hi));
            lo = hi;
        }
        return WeightSpec::piecewise(std::move(ps), L);
    }
    return WeightSpec::piecewise({single_piece_from_json(j, 0.0, L)}, L);
}

nlohmann::json weight_to_json(const WeightSpec& w) {
    if (w.is_custom()) throw std::invalid_argument("custom weights have no JSON form");
    const auto& ps = w.pieces();
    if (ps.size() == 1) return piece_to_json(ps[0]);
    nlohmann::json j;
    j["type"] = "piecewise";
    nlohmann::json breaks = nlohmann::json::array();
    nlohmann::json pieces = nlohmann::json::array();
    for (size_t i = 0; i < ps.size(); ++i) {
        if (i) breaks.push_back(ps[i].lo);
        pieces.push_back(piece_to_json(ps[i]));
    }
    j["breaks"] = breaks;
    j["pieces"] = pieces;
    return j;
}

}  // namespace lorembed
