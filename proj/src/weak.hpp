#ifndef LOREMBED_WEAK_HPP
#define LOREMBED_WEAK_HPP

#include "problem.hpp"
#include "quasiconcave.hpp"

namespace lorembed {

/// Sandwich representation of the weak fundamental function:
///   B1 * phi(t) <= gamma + delta * U(t) + int min{U(t), U(s)} dnu(s)
///               <= B2 * phi(t).
/// Stored as a RepMeasure over rho = U with alpha = gamma, beta = delta,
/// C1 = B1, C2 = B2, so the representation machinery (verification, minimum
/// integrals) applies unchanged.
struct WeakRep {
    RepMeasure measure;
    /// Worst relative violation of the sandwich on the check grid (0 when it
    /// holds within tolerance).
    double sandwich_excess = 0.0;

    /// gamma + int_(0,t] U dnu  and  delta + nu([t, L)) -- the running
    /// partial integrals the characterization integrands consume.  An atom
    /// exactly at t belongs to both.  Set by every constructor (closed forms
    /// in differentiable mode, cumulative sums over the atomized measure
    /// otherwise); evaluators fall back to a generic scan when empty.
    std::function<ExtValue(double)> prefix_fn;
    std::function<ExtValue(double)> suffix_fn;

    ExtValue gamma() const { return measure.alpha; }
    ExtValue delta() const { return measure.beta; }
    double B1() const { return measure.C1; }
    double B2() const { return measure.C2; }
};

enum class WeakRepMode {
    /// v itself is the fundamental function: v is U-quasiconcave with v'/u
    /// nonincreasing.  gamma = v(0+), delta = lim v/U at L-, dnu = (-v'/u)'
    /// as atoms at piece boundaries plus a density; B1 = 1, B2 = 2.
    /// Requires all pieces of v and u zero-anchored pure powers; anything
    /// else throws with a pointer to the generic mode.
    Differentiable,
    /// Canonical construction from phi_weak itself: gamma = phi(0+),
    /// delta = (phi/U)(L-), nu = the decrement measure of phi/U atomized on
    /// the shared grid; B1 = 1, B2 = 4.
    Generic,
};

/// Build a representation (p = inf only).  Throws std::domain_error when the
/// weak fundamental function is infinite (no finite representation exists).
WeakRep weak_rep(const EmbeddingProblem& prob, WeakRepMode mode);

/// Wrap a caller-supplied representation and verify its sandwich on the
/// grid; the result records the worst violation, it is never rejected.
WeakRep weak_rep_user(const EmbeddingProblem& prob, RepMeasure measure);

/// Weak-case characterizations (p = inf).  Same conventions as the strong
/// ones: extended arithmetic throughout, infinite phi collapses everything
/// to 0, out-of-region calls throw std::invalid_argument.

/// q >= 1: limit terms plus the integral with the W/U^q envelope and the
/// running prefix/suffix integrals of nu.
ConstantReport A6(const EmbeddingProblem& prob, const WeakRep& rep);

/// q < 1: same shape with xi_weak in place of the envelope factor.
ConstantReport A7(const EmbeddingProblem& prob, const WeakRep& rep);

/// q < 1 single-integral alternative to A7, equivalent exactly when xi is
/// finite (auxiliary["assumxi"]); on violation A7 = inf while A8 = 0.
ConstantReport A8(const EmbeddingProblem& prob);

/// Free-function form of the weak fundamental function.
ExtValue phi_weak(const EmbeddingProblem& prob, double t);

}  // namespace lorembed

#endif
