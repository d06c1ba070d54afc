#ifndef LOREMBED_QUADRATURE_HPP
#define LOREMBED_QUADRATURE_HPP

#include <functional>

#include "extval.hpp"

namespace lorembed {

using RealFn = std::function<double(double)>;

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_panels = 4000;          ///< interior adaptive subdivision cap
    bool singular_left = false;     ///< force an endpoint walk at a (automatic when a == 0)
    bool singular_right = false;    ///< force an endpoint walk at b (automatic when b == inf)
};

struct QuadResult {
    ExtValue value;
    double abs_error = 0.0;
    bool converged = false;
    int panels = 0;
};

/// Adaptive integral of f over (a, b), 0 <= a < b <= inf.
///
/// Interior panels use a Gauss-Kronrod 7/15 pair with worst-first bisection.
/// Endpoints at 0 (and any endpoint flagged singular) are approached through
/// the substitution t = e^{-x} (resp. its mirror t = b - e^{-x}, t = e^{x}
/// for b = inf), marching unit panels in x toward the endpoint.  The integral
/// is declared infinite when panel sums exceed ext_cap(), grow by more than
/// 1% per panel for 40 consecutive panels, or the walk exhausts machine range
/// while the panel sums fail to decay at a clearly summable rate (fitted
/// decay power below 1.25 in the walk coordinate; slowly decaying summable
/// sums are closed with a power-law tail extrapolation instead).
/// Non-evaluable integrand values (NaN, or inf outside an established
/// divergence) raise EvalError.
QuadResult integrate(const RealFn& f, double a, double b, const QuadOptions& opt = {});

struct SupResult {
    ExtValue value;
    double argmax = 0.0;
    bool at_left = false;    ///< supremum approached at the lower endpoint
    bool at_right = false;   ///< supremum approached at the upper endpoint
};

/// Supremum of g over the open interval (lo, hi), lo >= 0, hi <= inf.
/// Log-spaced scan (512 points, clustered toward both endpoints) followed by
/// local refinement; marches into an endpoint when the maximum sits there.
SupResult sup_on(const RealFn& g, double lo, double hi, double tol = 1e-8);

/// Supremum over the whole domain (0, L).
inline SupResult sup_search(const RealFn& g, double L, double tol = 1e-8) {
    return sup_on(g, 0.0, L, tol);
}

enum class Endpoint { Zero, End };

/// One-sided limit of g at 0+ or L- along a geometric sequence (ratio 1/4,
/// 24 terms) with Aitken extrapolation.  Values growing beyond ext_cap() (or
/// doubling sustainedly) give inf; values shrinking below 1e-300 (or halving
/// sustainedly) give 0.  Logarithmic rates in t (a power of the sample index)
/// are resolved by an algebraic plateau fit: a plateau indistinguishable from
/// the fit drift reports 0 (resp. inf for mirrored growth).  Oscillation
/// without convergence raises std::runtime_error("limit not resolved ...").
ExtValue limit_at_endpoint(const RealFn& g, Endpoint which, double L, double tol = 1e-7);

}  // namespace lorembed

#endif
