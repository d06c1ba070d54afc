#ifndef LOREMBED_EXTVAL_HPP
#define LOREMBED_EXTVAL_HPP

#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace lorembed {

/// Thrown when an integrand or ratio cannot be evaluated (NaN, negative value
/// where a nonnegative one is required, ...).  Carries the offending point.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, double point)
        : std::runtime_error(what + " at t=" + std::to_string(point)), point_(point) {}
    double point() const { return point_; }
private:
    double point_;
};

/// Magnitude beyond which finite results are promoted to infinity.
double ext_cap();
void set_ext_cap(double cap);

/// Value in the extended nonnegative half-line [0, inf].
///
/// Arithmetic follows the degenerate-case conventions used throughout the
/// functional inequalities here: 1/inf = 0, inf/inf = 0, 0/0 = 0, 0/inf = 0,
/// 0*inf = 0, 1/0 = inf.  Products and quotients therefore never produce NaN;
/// any finite result with magnitude above ext_cap() becomes inf.
class ExtValue {
public:
    ExtValue() : v_(0.0) {}
    ExtValue(double v) {  // NOLINT: implicit by design, doubles mix freely
        if (std::isnan(v)) throw EvalError("NaN entered extended arithmetic", 0.0);
        if (v < 0.0) {
            // Tolerate tiny negative rounding noise from quadrature.
            if (v > -1e-12) v = 0.0;
            else throw std::domain_error("negative value in nonnegative extended arithmetic: " + std::to_string(v));
        }
        v_ = (v > ext_cap()) ? inf_raw() : v;
    }

    static ExtValue infinity() { ExtValue e; e.v_ = inf_raw(); return e; }

    bool is_inf() const { return std::isinf(v_); }
    bool is_zero() const { return v_ == 0.0; }
    /// Finite value (or +inf as a double for the infinite element).
    double value() const { return v_; }

    friend ExtValue operator+(ExtValue a, ExtValue b) {
        if (a.is_inf() || b.is_inf()) return infinity();
        return ExtValue(a.v_ + b.v_);
    }
    friend ExtValue operator*(ExtValue a, ExtValue b) {
        if (a.is_zero() || b.is_zero()) return ExtValue(0.0);  // 0*inf = 0
        if (a.is_inf() || b.is_inf()) return infinity();
        return ExtValue(a.v_ * b.v_);
    }
    friend ExtValue operator/(ExtValue a, ExtValue b) {
        if (a.is_zero()) return ExtValue(0.0);        // 0/x = 0, including 0/0 and 0/inf
        if (b.is_inf()) return ExtValue(0.0);         // x/inf = 0, including inf/inf
        if (b.is_zero()) return infinity();           // x/0 = inf for x > 0
        if (a.is_inf()) return infinity();
        return ExtValue(a.v_ / b.v_);
    }
    friend bool operator==(ExtValue a, ExtValue b) { return a.v_ == b.v_; }
    friend bool operator<(ExtValue a, ExtValue b) { return a.v_ < b.v_; }
    friend bool operator<=(ExtValue a, ExtValue b) { return a.v_ <= b.v_; }
    friend bool operator>(ExtValue a, ExtValue b) { return a.v_ > b.v_; }
    friend bool operator>=(ExtValue a, ExtValue b) { return a.v_ >= b.v_; }

private:
    static double inf_raw() { return std::numeric_limits<double>::infinity(); }
    double v_;
};

/// x^e on [0, inf] with 0^e = inf for e < 0, x^0 = 1 (also for x in {0, inf}).
ExtValue ext_pow(ExtValue x, double e);

/// prod_i base_i^{exp_i} on [0, inf], accumulated in log space so that no
/// intermediate power can underflow or overflow on its own.  Conventions
/// match the operators above: an exponent of 0 ignores its base (even 0 or
/// inf), a zero contribution (0^{e>0} or inf^{e<0}) wins over an infinite
/// one (0 * inf = 0), and a finite result beyond ext_cap() becomes inf.
/// NaN bases raise EvalError, negative ones std::domain_error.
ExtValue ext_prod_pow(std::initializer_list<std::pair<double, double>> factors);

/// x when positive, the smallest positive double otherwise.  For quantities
/// that are mathematically positive but were assembled from sums whose every
/// addend underflowed; keeping them positive stops a later negative power in
/// ext_prod_pow from turning the underflow into a spurious infinity.
double positive_floor(double x);

}  // namespace lorembed

#endif
