#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lorembed {

namespace {

/// W(t) as an extended value, valid on [0, L] including an infinite endpoint.
ExtValue prim_at(const Primitive& P, double t) {
    double L = P.base().L();
    if (t >= L) return P.value_at_L();
    return ExtValue(P.eval(t));
}

/// W(b) - W(a) without prefix cancellation; b may be the endpoint.
ExtValue prim_between(const Primitive& P, double a, double b) {
    double L = P.base().L();
    if (b >= L) {
        ExtValue end = P.value_at_L();
        if (end.is_inf()) return ExtValue::infinity();
        return ExtValue(end.value() - P.eval(a));
    }
    return ExtValue(P.between(a, b));
}

}  // namespace

double StepFunction::operator()(double t) const {
    if (t < 0.0) throw std::invalid_argument("step function argument must be nonnegative");
    auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    size_t i = static_cast<size_t>(it - breaks.begin());
    return i < values.size() ? values[i] : 0.0;
}

bool StepFunction::is_zero() const {
    for (double c : values)
        if (c > 0.0) return false;
    return true;
}

void StepFunction::validate(double L) const {
    if (breaks.size() != values.size())
        throw std::invalid_argument("step function: breaks and values differ in length");
    double prev_b = 0.0;
    for (double b : breaks) {
        if (!(b > prev_b) || !(b <= L) || !std::isfinite(b))
            throw std::invalid_argument("step function: breaks must increase strictly within (0, L]");
        prev_b = b;
    }
    double prev_v = std::numeric_limits<double>::infinity();
    for (double c : values) {
        if (!(c >= 0.0) || !std::isfinite(c))
            throw std::invalid_argument("step function: values must be finite and nonnegative");
        if (c > prev_v)
            throw std::invalid_argument("step function: values must be nonincreasing");
        prev_v = c;
    }
}

StepFunction indicator(double t1) {
    if (!(t1 > 0.0)) throw std::invalid_argument("indicator needs a positive break");
    StepFunction f;
    f.breaks = {t1};
    f.values = {1.0};
    return f;
}

StepFunction canonical(StepFunction f) {
    StepFunction out;
    out.breaks.reserve(f.breaks.size());
    out.values.reserve(f.values.size());
    for (size_t i = 0; i < f.breaks.size(); ++i) {
        if (!out.breaks.empty() && f.values[i] == out.values.back()) {
            out.breaks.back() = f.breaks[i];  // extend the equal-value run
            continue;
        }
        if (!out.breaks.empty() && !(f.breaks[i] > out.breaks.back()))
            continue;  // zero-width piece
        out.breaks.push_back(f.breaks[i]);
        out.values.push_back(f.values[i]);
    }
    while (!out.values.empty() && out.values.back() == 0.0) {
        out.values.pop_back();
        out.breaks.pop_back();
    }
    return out;
}

ExtValue lambda_norm(const StepFunction& f, double q, const WeightSpec& w) {
    if (!(q > 0.0)) throw std::invalid_argument("lambda_norm needs q > 0");
    StepFunction c = canonical(f);
    c.validate(w.L());
    if (c.values.empty()) return ExtValue(0.0);
    if (std::isinf(q)) {
        ExtValue best(0.0);
        double prev = 0.0;
        for (size_t i = 0; i < c.breaks.size(); ++i) {
            ExtValue piece = ExtValue(c.values[i]) * sup_on([&w](double t) { return w(t); },
                                                            prev, c.breaks[i]).value;
            if (piece > best) best = piece;
            prev = c.breaks[i];
        }
        return best;
    }
    ExtValue sum(0.0);
    Primitive W = primitive(w);
    double prev = 0.0;
    for (size_t i = 0; i < c.breaks.size(); ++i) {
        sum = sum + ext_pow(ExtValue(c.values[i]), q) * prim_between(W, prev, c.breaks[i]);
        prev = c.breaks[i];
    }
    return ext_pow(sum, 1.0 / q);
}

double f_double_star(const StepFunction& f, const Primitive& U, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("f_double_star needs t > 0");
    double L = U.base().L();
    ExtValue Ut = prim_at(U, std::min(t, L));
    double mass = 0.0;
    double prev = 0.0;
    for (size_t i = 0; i < f.breaks.size() && prev < t; ++i) {
        double hi = std::min(f.breaks[i], t);
        if (hi > prev && f.values[i] > 0.0) mass += f.values[i] * U.between(prev, hi);
        prev = f.breaks[i];
    }
    return (ExtValue(mass) / Ut).value();
}

ExtValue gamma_norm(const StepFunction& f, double p, const WeightSpec& u,
                    const WeightSpec& v) {
    if (!(p > 0.0)) throw std::invalid_argument("gamma_norm needs p > 0");
    if (u.L() != v.L()) throw std::invalid_argument("gamma_norm: weights disagree on L");
    double L = u.L();
    StepFunction c = canonical(f);
    c.validate(L);
    if (c.values.empty()) return ExtValue(0.0);

    Primitive U = primitive(u);
    Primitive V = primitive(v);
    size_t N = c.breaks.size();

    // Partial inner masses S_i = int_0^{b_i} f u; interior breaks keep these
    // finite because U is finite on the interior.
    std::vector<double> S(N + 1, 0.0);
    for (size_t i = 0; i < N; ++i) {
        double lo = i == 0 ? 0.0 : c.breaks[i - 1];
        double hi = c.breaks[i];
        S[i + 1] = S[i] + (hi >= L && U.value_at_L().is_inf()
                               ? std::numeric_limits<double>::infinity()
                               : c.values[i] * U.between(lo, std::min(hi, L)));
    }

    auto averaged = [&](size_t i, double t) {
        // Value of (1/U(t)) int_0^t f u for t inside piece i (i >= 1).
        double lo = c.breaks[i - 1];
        return (S[i] + c.values[i] * U.between(lo, t)) / U.eval(t);
    };

    if (std::isinf(p)) {
        // On the first piece the average is exactly values[0].
        ExtValue best = ExtValue(c.values[0]) *
                        sup_on([&v](double t) { return v(t); }, 0.0, c.breaks[0]).value;
        for (size_t i = 1; i < N; ++i) {
            ExtValue s = sup_on([&](double t) { return averaged(i, t) * v(t); },
                                c.breaks[i - 1], c.breaks[i]).value;
            if (s > best) best = s;
        }
        if (c.breaks[N - 1] < L && S[N] > 0.0) {
            ExtValue s = ExtValue(S[N]) *
                         sup_on([&](double t) { return v(t) / U.eval(t); },
                                c.breaks[N - 1], L).value;
            if (s > best) best = s;
        }
        return best;
    }

    ExtValue total = ext_pow(ExtValue(c.values[0]), p) * prim_at(V, c.breaks[0]);
    for (size_t i = 1; i < N; ++i) {
        QuadOptions opt;
        opt.rel_tol = 1e-9;
        opt.abs_tol = 1e-14;
        opt.singular_right = (c.breaks[i] >= L) && std::isfinite(L);
        total = total + integrate([&](double t) {
                            return std::pow(averaged(i, t), p) * v(t);
                        },
                        c.breaks[i - 1], std::min(c.breaks[i], L), opt)
                            .value;
    }
    if (c.breaks[N - 1] < L && S[N] > 0.0)
        total = total + ext_pow(ExtValue(S[N]), p) * tail_integral(v, U, p, c.breaks[N - 1]);
    return ext_pow(total, 1.0 / p);
}

}  // namespace lorembed
