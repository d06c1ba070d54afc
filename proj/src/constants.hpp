#ifndef LOREMBED_CONSTANTS_HPP
#define LOREMBED_CONSTANTS_HPP

#include "problem.hpp"

namespace lorembed {

struct WeakRep;  // weak.hpp

/// Optimal-constant characterizations for p < inf.  Each evaluator follows
/// its displayed formula in extended arithmetic, so degenerate inputs come
/// out as 0 (the 1/inf convention) without special-casing, and 0 * inf
/// corners in the limit terms resolve to 0.  Preconditions are the parameter
/// regions of the respective cases; out-of-region calls throw
/// std::invalid_argument.

/// Case I (q >= 1, p <= q < inf), and a lower-bound witness in every case:
///   sup_t W^{1/q}(t) / phi^{1/p}(t).
ConstantReport A1(const EmbeddingProblem& prob);

/// Case II (1 <= q < p < inf): the r-integral with the U^-r W^(p/(p-q))
/// envelope plus limit terms at both endpoints.
ConstantReport A2(const EmbeddingProblem& prob);

/// Case III (p <= q < 1): sup of (W^{1/q} + U * wtail^{(1-q)/q}) / phi^{1/p}.
ConstantReport A3(const EmbeddingProblem& prob);

/// Case IV (q < 1, q < p < inf): endpoint limit terms with full-range
/// W^{q/(1-q)}-integrals plus the r-integral with the
/// (W^{1/(1-q)} + U^{q/(1-q)} wtail)^{p(1-q)/(p-q)} kernel.
ConstantReport A4(const EmbeddingProblem& prob);

/// Single-integral alternative to A4, equivalent exactly when the weighted
/// tail is finite (auxiliary["assumW"]); when that assumption fails the
/// report still carries A5's literal value (possibly 0 while A4 = inf) with
/// the flag cleared so callers see the two have decoupled.
ConstantReport A5(const EmbeddingProblem& prob);

/// int_0^L min{U^c(t), U^c(s)} W^c(s) w(s) U^-c(s) ds with c = q/(1-q),
/// evaluated by the exact split (1-q) W^{1/(1-q)}(t) + U^c(t) wtail(t);
/// requires q < 1.
ExtValue xi_strong(const EmbeddingProblem& prob, double t);

/// The same integral raised to the power 1-q (the p = inf variant).
ExtValue xi_weak(const EmbeddingProblem& prob, double t);

/// Classify and evaluate the case-appropriate characterization.  For p = inf
/// a representation of the weak fundamental function is built automatically
/// (differentiable route when the weights allow it, generic otherwise)
/// unless one is supplied.
ConstantReport optimal_constant_estimate(const EmbeddingProblem& prob,
                                         const WeakRep* rep = nullptr);

}  // namespace lorembed

#endif
