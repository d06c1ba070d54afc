#ifndef LOREMBED_PROBLEM_HPP
#define LOREMBED_PROBLEM_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "extval.hpp"
#include "weights.hpp"

namespace lorembed {

/// Parameter regions of the embedding, keyed on (p, q) with a degeneracy
/// screen that takes precedence over the others.
enum class CaseTag { I, II, III, IV, WeakGe1, WeakLt1, Degenerate };

const char* case_name(CaseTag tag);

/// One evaluated optimal-constant characterization, split into the parts the
/// displayed formula is built from.  The convention is uniform: A_value is
/// always the extended-value sum of the three parts; single-expression cases
/// (a lone sup or integral) live entirely in integral_term with zero limit
/// terms.  `auxiliary` carries scalar diagnostics (assumption flags, probe
/// samples, sup locations); infinities are stored as the double inf.
struct ConstantReport {
    CaseTag tag = CaseTag::I;
    ExtValue A_value;
    ExtValue limit_term_zero;
    ExtValue limit_term_L;
    ExtValue integral_term;
    std::map<std::string, double> auxiliary;
};

/// The embedding of a p-mean Lorentz space with inner weight u, outer weight
/// v, into a q-mean space with weight w, all on a shared interval (0, L).
///
/// Immutable: weights and their running integrals are fixed at construction,
/// the case tag is classified once, and the sup envelopes the evaluators need
/// are precomputed on a shared log grid.  All methods are const and safe to
/// call concurrently.
///
/// p may be infinite (the weak case); q is finite positive.  Construction
/// validates that u is admissible (its running integral strictly increasing),
/// that v and w have positive finite running integrals on the interior, and
/// that all three weights share the same L.
class EmbeddingProblem {
  public:
    EmbeddingProblem(WeightSpec u, WeightSpec v, WeightSpec w, double p, double q);

    double p() const;
    double q() const;
    /// pq/(p-q); only meaningful when q < p < inf.
    double r() const;
    double L() const;
    CaseTag tag() const;
    /// True when the tail integral of v against U^{-p} diverges (p < inf);
    /// every characterization collapses to zero then.
    bool degenerate() const;
    /// True when p = inf and the weak fundamental function is infinite.
    bool weak_degenerate() const;

    const WeightSpec& u() const;
    const WeightSpec& v() const;
    const WeightSpec& w() const;
    const Primitive& U() const;
    const Primitive& V() const;
    const Primitive& W() const;
    /// lim_{t->L-} W(t), possibly inf.
    ExtValue W_at_L() const;

    /// int_t^L v(s) U^{-p}(s) ds; inf exactly in the degenerate case.
    ExtValue tail(double t) const;

    /// Fundamental function V(t) + U^p(t) * tail(t) for p < inf.
    /// Equals int_0^L min{U^p(t), U^p(s)} v(s) U^{-p}(s) ds and is
    /// U^p-quasiconcave; identically inf in the degenerate case.
    ExtValue phi(double t) const;

    /// Weighted tail int_t^L W^{q/(1-q)}(s) w(s) U^{-q/(1-q)}(s) ds used by
    /// the q < 1 characterizations; requires q < 1.  t = 0 gives the
    /// full-range integral.
    ExtValue wtail(double t) const;

    /// sup over [t, L) of U^{-r} W^{p/(p-q)}, served from the precomputed
    /// envelope; available exactly in case II.
    ExtValue envelope_supA2(double t) const;

    /// sup over (t, L) of W / U^q, served from the precomputed envelope;
    /// available when p = inf and q >= 1.
    ExtValue envelope_supWq(double t) const;

    /// Weak fundamental function for p = inf:
    ///   sup_{s in (0,L)} v(s) min{1, U(t)/U(s)}
    /// evaluated from cached running sups of v and v/U with local refinement.
    ExtValue phi_weak(double t) const;

    /// The shared log grid the caches live on (exposed for verification).
    const std::vector<double>& grid() const;

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Classification by (p, q) with the degeneracy screen first; the tail probe
/// at a single interior point suffices because divergence at one point forces
/// divergence at all of them.
CaseTag classify(const EmbeddingProblem& prob);

/// Fundamental function as a free operation (mirrors EmbeddingProblem::phi).
ExtValue fundamental_phi(const EmbeddingProblem& prob, double t);

}  // namespace lorembed

#endif
