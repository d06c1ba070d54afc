#include "quasiconcave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lorembed {

namespace {

constexpr double kSlack = 1e-9;  // relative slack for axiom verification
// threshold-hit tolerance for the marches; kept well below kSlack so points
// accepted by a march always satisfy the verified bands
constexpr double kFloorTol = 1e-10;
const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> make_log_grid(double L, int n) {
    std::vector<double> g;
    g.reserve(static_cast<size_t>(n));
    if (std::isinf(L)) {
        for (int i = 0; i < n; ++i)
            g.push_back(1e-8 * std::pow(1e16, i / double(n - 1)));
    } else {
        int half = n / 2;
        for (int i = 0; i < half; ++i)
            g.push_back(L * 1e-9 * std::pow(0.5e9, i / double(half - 1)));
        for (int i = 0; i < n - half; ++i)
            g.push_back(L * (1.0 - 1e-9 * std::pow(0.5e9, i / double(n - half - 1))));
        std::sort(g.begin(), g.end());
    }
    return g;
}

QcCheck is_quasiconcave(const RealFn& h, const RealFn& rho, const std::vector<double>& grid) {
    QcCheck r;
    bool first = true;
    double ph = 0.0, pq = 0.0;
    for (double t : grid) {
        double ht = h(t);
        double qt = ht / rho(t);
        if (!first) {
            // h must not decrease
            if (std::isfinite(ph) && ht < ph * (1.0 - 1e-12)) {
                double v = (ph - ht) / ph;
                if (v > r.worst) { r.worst = v; r.at = t; r.ok = false; }
            }
            // h/rho must not increase
            if (std::isfinite(qt) && std::isfinite(pq) && qt > pq * (1.0 + 1e-12)) {
                double v = (qt - pq) / pq;
                if (v > r.worst) { r.worst = v; r.at = t; r.ok = false; }
            }
        }
        first = false;
        ph = ht;
        pq = qt;
    }
    return r;
}

ExtValue measure_min_integral(const RepMeasure& rep, const RealFn& rho, double L, double t,
                              double rel_tol) {
    ExtValue total(0.0);
    double rt = rho(t);
    for (const RepAtom& a : rep.atoms) {
        double rs = rho(a.s);
        total = total + ExtValue(std::min(rt, rs)) * ExtValue(a.mass);
    }
    if (rep.density) {
        QuadOptions opt;
        opt.rel_tol = rel_tol;
        opt.abs_tol = 1e-14;
        if (t > 0.0) {
            QuadResult below =
                integrate([&](double s) { return rho(s) * rep.density(s); }, 0.0, std::min(t, L), opt);
            total = total + below.value;
        }
        if (t < L) {
            QuadOptions o2 = opt;
            o2.singular_right = true;
            QuadResult above = integrate(rep.density, t, L, o2);
            total = total + ExtValue(rt) * above.value;
        }
    }
    return total;
}

ExtValue measure_min_value(const RepMeasure& rep, const RealFn& rho, double L, double t,
                           double rel_tol) {
    if (rep.analytic_R) return ExtValue(rep.analytic_R(t));
    return measure_min_integral(rep, rho, L, t, rel_tol);
}

ExtValue represented_function(const RepMeasure& rep, const RealFn& rho, double L, double t) {
    return rep.alpha + rep.beta * ExtValue(rho(t)) + measure_min_integral(rep, rho, L, t);
}

double verify_representation(const RealFn& h, const RealFn& rho, const RepMeasure& rep,
                             double L, const std::vector<double>& grid) {
    double worst = 0.0;
    for (double t : grid) {
        ExtValue R = represented_function(rep, rho, L, t);
        ExtValue ht(h(t));
        ExtValue lo = ExtValue(rep.C1) * ht;
        ExtValue hi = ExtValue(rep.C2) * ht;
        if (R < lo) {
            double v = lo.is_inf() ? 1.0 : (lo.value() - R.value()) / lo.value();
            worst = std::max(worst, v);
        } else if (hi < R) {
            double v = R.is_inf() ? 1.0 : (R.value() - hi.value()) / R.value();
            worst = std::max(worst, v);
        }
    }
    return worst;
}

namespace {

enum class Exit { Terminated, Budget, Floor };

struct MarchResult {
    std::vector<double> pts;  // beyond x0, in march order
    Exit exit = Exit::Terminated;
};

// First t > xk with h(t) >= a*h(xk) and (rho/h)(t) >= a*(rho/h)(xk); the
// predicate is monotone because both h and rho/h are nondecreasing.
MarchResult march_right(const RealFn& h, const RealFn& ratio, double a, double x0, double L,
                        int budget) {
    MarchResult m;
    double xk = x0, hk = h(x0), rk = ratio(x0);
    while (true) {
        if (static_cast<int>(m.pts.size()) >= budget) { m.exit = Exit::Budget; return m; }
        if (!(hk > 0.0) || std::isinf(hk) || !(rk > 0.0) || std::isinf(rk)) {
            m.exit = Exit::Floor;
            return m;
        }
        const double Ah = a * hk, Ar = a * rk;
        auto P = [&](double t) { return h(t) >= Ah && ratio(t) >= Ar; };
        double t_true = std::numeric_limits<double>::quiet_NaN();
        double last_false = xk;
        if (std::isinf(L)) {
            double t = xk;
            for (int j = 0; j < 1100; ++j) {
                t *= 2.0;
                if (t > 1e300) break;
                if (P(t)) { t_true = t; break; }
                last_false = t;
            }
        } else {
            double gap = L - xk;
            for (int j = 1; j <= 60; ++j) {
                double t = L - gap * std::pow(0.5, j);
                if (t <= xk || t >= L) continue;
                if (P(t)) { t_true = t; break; }
                last_false = t;
            }
        }
        if (std::isnan(t_true)) { m.exit = Exit::Terminated; return m; }
        double lo = last_false, hi = t_true;
        for (int it = 0; it < 200; ++it) {
            double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
            if (!(mid > lo) || !(mid < hi)) break;
            if (P(mid)) hi = mid; else lo = mid;
            if (hi - lo <= 1e-13 * hi) break;
        }
        double hn = h(hi), rn = ratio(hi);
        // stop before h or rho/h leaves the representable range
        if (!(hn > 0.0) || std::isinf(hn) || !(rn > 0.0) || std::isinf(rn)) {
            m.exit = Exit::Floor;
            return m;
        }
        // for continuous inputs the binding constraint sits on its threshold;
        // a visible overshoot means the function values have become too
        // coarsely quantized (e.g. subnormal intermediates) to place points
        if (std::min(hn / Ah, rn / Ar) > 1.0 + kFloorTol) {
            m.exit = Exit::Floor;
            return m;
        }
        m.pts.push_back(hi);
        xk = hi; hk = hn; rk = rn;
    }
}

// Largest t < xk with h(t) <= h(xk)/a and (rho/h)(t) <= (rho/h)(xk)/a.
MarchResult march_left(const RealFn& h, const RealFn& ratio, double a, double x0, int budget) {
    MarchResult m;
    double xk = x0, hk = h(x0), rk = ratio(x0);
    while (true) {
        if (static_cast<int>(m.pts.size()) >= budget) { m.exit = Exit::Budget; return m; }
        if (!(hk > 0.0) || std::isinf(hk) || !(rk > 0.0) || std::isinf(rk)) {
            m.exit = Exit::Floor;
            return m;
        }
        const double Bh = hk / a, Br = rk / a;
        auto Q = [&](double t) { return h(t) <= Bh && ratio(t) <= Br; };
        double t_true = std::numeric_limits<double>::quiet_NaN();
        double last_false = xk;
        double t = xk;
        for (int j = 0; j < 1100; ++j) {
            t *= 0.5;
            if (t < 1e-300) break;
            if (Q(t)) { t_true = t; break; }
            last_false = t;
        }
        if (std::isnan(t_true)) { m.exit = Exit::Terminated; return m; }
        double lo = t_true, hi = last_false;
        for (int it = 0; it < 200; ++it) {
            double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
            if (!(mid > lo) || !(mid < hi)) break;
            if (Q(mid)) lo = mid; else hi = mid;
            if (hi - lo <= 1e-13 * hi) break;
        }
        double hn = h(lo), rn = ratio(lo);
        // stop before h or rho/h leaves the representable range
        if (!(hn > 0.0) || std::isinf(hn) || !(rn > 0.0) || std::isinf(rn)) {
            m.exit = Exit::Floor;
            return m;
        }
        // mirror of the march_right overshoot stop: the binding threshold
        // must be hit, otherwise precision has run out at this depth
        if (std::max(hn / Bh, rn / Br) < 1.0 - kFloorTol) {
            m.exit = Exit::Floor;
            return m;
        }
        m.pts.push_back(lo);
        xk = lo; hk = hn; rk = rn;
    }
}

ExtValue h_at(const CoveringSequence& cs, size_t i, const ExtValue& h0, const ExtValue& hL) {
    if (i == 0 && cs.left_terminates) return h0;
    if (i + 1 == cs.points.size() && cs.right_terminates) return hL;
    return ExtValue(cs.h(cs.points[i]));
}

double as_double(const ExtValue& v) {
    return v.is_inf() ? std::numeric_limits<double>::infinity() : v.value();
}

// Sample points inside (lo, hi); a sentinel end is approached geometrically
// but never touched.
std::vector<double> interval_samples(double lo, double hi, int n, bool lo_sent, bool hi_sent) {
    std::vector<double> s;
    s.reserve(2 * static_cast<size_t>(n) + 1);
    if (lo_sent && hi_sent) {
        double mid = std::isinf(hi) ? 1.0 : hi * 0.5;
        for (int j = 0; j <= n; ++j) s.push_back(mid * std::pow(0.5, j));
        for (int j = 1; j <= n; ++j)
            s.push_back(std::isinf(hi) ? mid * std::pow(2.0, j)
                                       : hi - (hi - mid) * std::pow(0.5, j));
    } else if (lo_sent) {
        for (int j = 0; j <= n; ++j) s.push_back(hi * std::pow(0.5, j));
    } else if (hi_sent) {
        if (std::isinf(hi)) {
            for (int j = 0; j <= n; ++j) s.push_back(lo * std::pow(2.0, j));
        } else {
            s.push_back(lo);
            for (int j = 1; j <= n; ++j) s.push_back(hi - (hi - lo) * std::pow(0.5, j));
        }
    } else {
        for (int j = 0; j <= n; ++j) s.push_back(lo + (hi - lo) * (double(j) / n));
    }
    return s;
}

}  // namespace

CoveringSequence build_covering_sequence(const RealFn& h, const RealFn& rho, double a,
                                         double x0, double L, int max_per_side) {
    if (!(a > 1.0)) throw std::invalid_argument("covering sequence needs a > 1");
    if (!(L > 0.0)) throw std::invalid_argument("domain length must be positive");
    if (!(x0 > 0.0) || !(x0 < L)) throw std::invalid_argument("x0 must lie inside (0, L)");

    auto ratio = [h, rho](double t) { return rho(t) / h(t); };

    if (!(h(x0) > 0.0)) {
        // a nonzero quasiconcave function is positive everywhere, so a few
        // zero probes identify the zero function
        bool all_zero = true;
        for (double f : {0.25, 0.5, 2.0}) {
            double t = std::isinf(L) ? x0 * (f + 0.5) : x0 + (L - x0) * f * 0.4;
            if (h(t) > 0.0) { all_zero = false; break; }
        }
        if (all_zero) throw std::domain_error("zero function");
        throw std::invalid_argument("h vanishes at x0 but not everywhere: not quasiconcave");
    }

    ExtValue hL = limit_at_endpoint(h, Endpoint::End, L);
    ExtValue rL = limit_at_endpoint(ratio, Endpoint::End, L);
    ExtValue h0 = limit_at_endpoint(h, Endpoint::Zero, L);
    ExtValue r0 = limit_at_endpoint(ratio, Endpoint::Zero, L);
    const bool right_endless = hL.is_inf() && rL.is_inf();
    const bool left_endless = h0.is_zero() && r0.is_zero();

    MarchResult right = march_right(h, ratio, a, x0, L, max_per_side);
    MarchResult left = march_left(h, ratio, a, x0, max_per_side);

    CoveringSequence cs;
    cs.a = a;
    cs.L = L;
    cs.h = h;
    cs.rho = rho;
    cs.left_terminates = (left.exit == Exit::Terminated) && !left_endless;
    cs.right_terminates = (right.exit == Exit::Terminated) && !right_endless;
    // every non-terminating side is a cut tail, whether the budget ran out or
    // the march hit the representable range
    cs.truncated_left = !cs.left_terminates;
    cs.truncated_right = !cs.right_terminates;

    if (left.pts.empty() && right.pts.empty() && cs.left_terminates && cs.right_terminates) {
        // no factor-a growth anywhere: try the single-interval sequence {0, L}
        ExtValue sa(a * (1.0 + kSlack));
        bool h_cmp = !(sa * h0 < hL);
        bool r_cmp = !(sa * r0 < rL);
        if (h_cmp || r_cmp) {
            cs.points = {0.0, L};
            cs.k_lo = -1;
            cs.k_hi = 0;
            cs.z_class = {h_cmp ? ZClass::HComparable : ZClass::RatioComparable};
            return cs;
        }
    }

    if (cs.left_terminates) cs.points.push_back(0.0);
    for (auto it = left.pts.rbegin(); it != left.pts.rend(); ++it) cs.points.push_back(*it);
    cs.points.push_back(x0);
    for (double t : right.pts) cs.points.push_back(t);
    if (cs.right_terminates) cs.points.push_back(L);

    cs.k_lo = -static_cast<int>(left.pts.size()) - (cs.left_terminates ? 1 : 0);
    cs.k_hi = static_cast<int>(right.pts.size()) + (cs.right_terminates ? 1 : 0);

    const double za = a * (1.0 + kSlack);
    cs.z_class.reserve(cs.points.size() - 1);
    for (size_t i = 1; i < cs.points.size(); ++i) {
        ExtValue prev = h_at(cs, i - 1, h0, hL);
        ExtValue cur = h_at(cs, i, h0, hL);
        bool h_cmp = !(ExtValue(za) * prev < cur);  // h(x_k) <= a*h(x_{k-1})
        cs.z_class.push_back(h_cmp ? ZClass::HComparable : ZClass::RatioComparable);
    }
    return cs;
}

CoveringReport verify_covering_sequence(const CoveringSequence& cs, int grid_per_interval) {
    CoveringReport rep;
    const auto& X = cs.points;
    const size_t n = X.size();
    auto ratio = [&cs](double t) { return cs.rho(t) / cs.h(t); };

    if (n < 2) {
        rep.monotone.pass = false;
        rep.monotone.detail = "fewer than two points";
        return rep;
    }

    // -- ordering and interior placement
    for (size_t i = 0; i + 1 < n; ++i) {
        if (!(X[i] < X[i + 1])) {
            rep.monotone.pass = false;
            rep.monotone.detail = "points not strictly increasing";
        }
    }
    for (size_t i = 0; i < n; ++i) {
        bool sent = (i == 0 && cs.left_terminates) || (i + 1 == n && cs.right_terminates);
        if (!sent && !(X[i] > 0.0 && X[i] < cs.L)) {
            rep.monotone.pass = false;
            rep.monotone.detail = "interior point outside (0, L)";
        }
    }
    if (cs.left_terminates && X.front() != 0.0) {
        rep.monotone.pass = false;
        rep.monotone.detail = "left sentinel missing";
    }
    if (cs.right_terminates && X.back() != cs.L) {
        rep.monotone.pass = false;
        rep.monotone.detail = "right sentinel missing";
    }

    // -- endpoint termination rules (the limits also serve as sentinel values
    //    for the comparability bands below)
    double anchor = cs.left_terminates ? X[1] : X[0];
    if (std::isinf(anchor)) anchor = std::isinf(cs.L) ? 2.0 : cs.L;
    double h0v = cs.h(anchor * 0.5);
    double r0v = ratio(anchor * 0.5);
    try {
        ExtValue hL = limit_at_endpoint(cs.h, Endpoint::End, cs.L);
        ExtValue rL = limit_at_endpoint(ratio, Endpoint::End, cs.L);
        ExtValue h0 = limit_at_endpoint(cs.h, Endpoint::Zero, cs.L);
        ExtValue r0 = limit_at_endpoint(ratio, Endpoint::Zero, cs.L);
        h0v = as_double(h0);
        r0v = as_double(r0);
        bool want_right_end = !(hL.is_inf() && rL.is_inf());
        bool want_left_end = !(h0.is_zero() && r0.is_zero());
        if (cs.right_terminates != want_right_end && !cs.truncated_right) {
            rep.endpoints.pass = false;
            rep.endpoints.detail = "right termination disagrees with endpoint limits";
        }
        if (cs.left_terminates != want_left_end && !cs.truncated_left) {
            rep.endpoints.pass = false;
            rep.endpoints.detail += (rep.endpoints.detail.empty() ? "" : "; ");
            rep.endpoints.detail += "left termination disagrees with endpoint limits";
        }
    } catch (const std::exception& e) {
        rep.endpoints.pass = false;
        rep.endpoints.detail = std::string("endpoint limit unresolved: ") + e.what();
    }

    // -- factor-a growth across steps with both ends interior
    for (size_t i = 1; i < n; ++i) {
        bool lo_sent = (i - 1 == 0 && cs.left_terminates);
        bool hi_sent = (i + 1 == n && cs.right_terminates);
        if (lo_sent || hi_sent) continue;
        double g1 = cs.h(X[i]) / (cs.a * cs.h(X[i - 1]));
        double g2 = ratio(X[i]) / (cs.a * ratio(X[i - 1]));
        double shortfall = 1.0 - std::min(g1, g2);
        if (shortfall > kSlack) {
            rep.growth.pass = false;
            rep.growth.detail = "growth factor below a between interior points";
        }
        rep.growth.worst = std::max(rep.growth.worst, std::max(0.0, shortfall));
    }

    // -- either-or comparability on each interval, and class consistency
    if (cs.z_class.size() != n - 1) {
        rep.z_consistency.pass = false;
        rep.z_consistency.detail = "class tags do not match interval count";
    }
    for (size_t i = 1; i < n; ++i) {
        bool lo_sent = (i == 1 && cs.left_terminates);
        bool hi_sent = (i == n - 1 && cs.right_terminates);
        auto ts = interval_samples(X[i - 1], X[i], grid_per_interval, lo_sent, hi_sent);

        // reference values: the h-branch pins h near h(x_k), the ratio branch
        // pins rho/h near (rho/h)(x_k); a sentinel right end uses the left
        // neighbour with the a-factor band shifted upward
        double href, rref;
        bool band_up = hi_sent;  // [ref, a*ref] instead of [ref/a, ref]
        if (hi_sent) {
            if (lo_sent) {  // single interval (0, L): anchor at the 0+ limits
                href = h0v;
                rref = r0v;
            } else {
                href = cs.h(X[i - 1]);
                rref = ratio(X[i - 1]);
            }
        } else {
            href = cs.h(X[i]);
            rref = ratio(X[i]);
        }
        double h_excess = 0.0, r_excess = 0.0;  // worst factor beyond the band
        for (double t : ts) {
            double ht = cs.h(t), rt = ratio(t);
            double hlo = band_up ? href : href / cs.a;
            double hhi = band_up ? cs.a * href : href;
            double rlo = band_up ? rref : rref / cs.a;
            double rhi = band_up ? cs.a * rref : rref;
            h_excess = std::max({h_excess, hlo / ht - 1.0, ht / hhi - 1.0});
            r_excess = std::max({r_excess, rlo / rt - 1.0, rt / rhi - 1.0});
        }
        bool h_ok = h_excess <= kSlack;
        bool r_ok = r_excess <= kSlack;
        if (!h_ok && !r_ok) {
            rep.comparability.pass = false;
            rep.comparability.detail = "interval comparable in neither h nor rho/h";
            rep.comparability.worst =
                std::max(rep.comparability.worst, std::min(h_excess, r_excess));
        }
        if (i - 1 < cs.z_class.size()) {
            bool tag_ok = cs.z_class[i - 1] == ZClass::HComparable ? h_ok : r_ok;
            double tag_excess = cs.z_class[i - 1] == ZClass::HComparable ? h_excess : r_excess;
            if (!tag_ok) {
                rep.z_consistency.pass = false;
                rep.z_consistency.detail = "interval violates its assigned comparability class";
            }
            rep.z_consistency.worst = std::max(rep.z_consistency.worst, tag_excess);
        }
    }

    return rep;
}

}  // namespace lorembed
