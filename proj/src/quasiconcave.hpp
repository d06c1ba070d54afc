#ifndef LOREMBED_QUASICONCAVE_HPP
#define LOREMBED_QUASICONCAVE_HPP

#include <string>
#include <vector>

#include "extval.hpp"
#include "quadrature.hpp"

namespace lorembed {

// h is rho-quasiconcave when h is nondecreasing and h/rho is nonincreasing
// (rho itself increasing, positive, continuous).  Such an h is either
// identically zero or strictly positive on (0, L).  The machinery below
// assumes h and rho continuous; the covering construction can misclassify
// intervals across jump discontinuities.

struct QcCheck {
    bool ok = true;
    double worst = 0.0;  ///< largest relative monotonicity violation found
    double at = 0.0;     ///< grid point where it happened
};

/// Pairwise check of h nondecreasing and h/rho nonincreasing with 1e-12 slack.
QcCheck is_quasiconcave(const RealFn& h, const RealFn& rho, const std::vector<double>& grid);

struct RepAtom {
    double s = 0.0;     ///< location in (0, L)
    double mass = 0.0;  ///< > 0
};

/// Measure-plus-limit-terms representation of a quasiconcave function:
///   R(t) = alpha + beta*rho(t) + sum_i min{rho(t), rho(s_i)}*m_i
///          + int_(0,L) min{rho(t), rho(s)} density(s) ds
/// sandwiched as C1*h(t) <= R(t) <= C2*h(t) on (0, L).  The canonical choice
/// alpha = h(0+), beta = (h/rho)(L-) achieves C1 = 1, C2 = 4.
struct RepMeasure {
    ExtValue alpha;
    ExtValue beta;
    std::vector<RepAtom> atoms;
    RealFn density;  ///< absolutely continuous part; empty = none
    double C1 = 1.0;
    double C2 = 4.0;
    /// Optional exact closed form of the measure part (atoms + density term).
    /// Fast-path evaluators may use it; verification never trusts it.
    RealFn analytic_R;
};

/// Measure part of R by honest quadrature, split at t (below t the min picks
/// rho(s), above it rho(t)).  Ignores analytic_R.
ExtValue measure_min_integral(const RepMeasure& rep, const RealFn& rho, double L, double t,
                              double rel_tol = 1e-9);

/// Measure part via analytic_R when available, quadrature otherwise.
ExtValue measure_min_value(const RepMeasure& rep, const RealFn& rho, double L, double t,
                           double rel_tol = 1e-9);

/// R(t) = alpha + beta*rho(t) + measure part, honest quadrature.
ExtValue represented_function(const RepMeasure& rep, const RealFn& rho, double L, double t);

/// Max over grid of the relative violation of C1*h <= R <= C2*h; 0 = sandwich holds.
double verify_representation(const RealFn& h, const RealFn& rho, const RepMeasure& rep,
                             double L, const std::vector<double>& grid);

/// Interval classification: on (x_{k-1}, x_k] either h stays within factor a
/// of h(x_k), or rho/h stays within factor a of (rho/h)(x_k).
enum class ZClass { HComparable, RatioComparable };

struct CoveringSequence {
    double a = 2.0;
    double L = 1.0;
    RealFn h, rho;
    /// x_{k_lo} .. x_{k_hi}, strictly increasing.  Includes the sentinel 0
    /// when the left side terminates and the sentinel L (possibly inf) when
    /// the right side does; evaluators treat sentinel values as one-sided
    /// limits and the final interval as half-open.
    std::vector<double> points;
    int k_lo = 0;  ///< index of points.front() (the builder's x0 has index 0)
    int k_hi = 0;  ///< index of points.back()
    bool left_terminates = true;   ///< sentinel 0 present; false = tail accumulates at 0
    bool right_terminates = true;  ///< sentinel L present; false = tail accumulates at L
    bool truncated_left = false;   ///< an infinite (or unresolved) tail was cut
    bool truncated_right = false;
    std::vector<ZClass> z_class;  ///< one per interval (points[i-1], points[i]]

    size_t intervals() const { return points.empty() ? 0 : points.size() - 1; }
};

/// Greedy bidirectional construction from x0.  The next point rightward is
/// the first t at which BOTH h and rho/h have grown by the factor a since the
/// current point (bisection on a monotone predicate); leftward mirrored.  A
/// side where no factor-a growth remains terminates with its sentinel; an
/// endless side (h and rho/h both unbounded at L, or both vanishing at 0) is
/// truncated after max_per_side points.  When neither side can grow at all
/// and one comparable interval covers (0, L), the two-point sequence {0, L}
/// is returned.
CoveringSequence build_covering_sequence(const RealFn& h, const RealFn& rho, double a,
                                         double x0, double L, int max_per_side = 200);

struct AxiomResult {
    bool pass = true;
    double worst = 0.0;
    std::string detail;
};

struct CoveringReport {
    AxiomResult monotone;       ///< points strictly increasing, interior ones inside (0, L)
    AxiomResult growth;         ///< factor-a growth of h and rho/h across interior steps
    AxiomResult comparability;  ///< either-or comparability on every interval
    AxiomResult endpoints;      ///< termination matches the h and rho/h endpoint limits
    AxiomResult z_consistency;  ///< each interval satisfies its assigned class
    bool all_pass() const {
        return monotone.pass && growth.pass && comparability.pass && endpoints.pass &&
               z_consistency.pass;
    }
};

CoveringReport verify_covering_sequence(const CoveringSequence& cs, int grid_per_interval = 24);

/// n-point logarithmic grid on (0, L), clustered toward both endpoints.
std::vector<double> make_log_grid(double L, int n);

}  // namespace lorembed

#endif
