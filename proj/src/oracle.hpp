#ifndef LOREMBED_ORACLE_HPP
#define LOREMBED_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "extval.hpp"
#include "problem.hpp"
#include "quadrature.hpp"
#include "weights.hpp"

namespace lorembed {

/// Nonincreasing nonnegative right-continuous step function
///
///   f(t) = sum_i values[i] * chi_[breaks[i-1], breaks[i])(t),   breaks[-1] = 0,
///
/// zero from the last break on.  Invariants: breaks strictly increasing in
/// (0, L], values nonnegative and nonincreasing, equal lengths.  The empty
/// function (no pieces) is the zero function.
struct StepFunction {
    std::vector<double> breaks;
    std::vector<double> values;

    double operator()(double t) const;
    bool is_zero() const;
    /// Throws std::invalid_argument when an invariant fails on (0, L].
    void validate(double L) const;
};

/// chi_[0, t1): the single-step indicator of height one.
StepFunction indicator(double t1);

/// Same function, minimal representation: trailing zero-value pieces dropped,
/// adjacent pieces with exactly equal values merged.  Evaluators run on the
/// canonical form, so a refined partition of a function scores bit-identically
/// to the coarse one.
StepFunction canonical(StepFunction f);

/// Lorentz q-norm against outer weight w:
///   ( sum_i values[i]^q * (W(t_i) - W(t_{i-1})) )^{1/q},
/// exact via primitive increments; q = inf takes max_i values[i] * (ess sup of
/// w on the piece).
ExtValue lambda_norm(const StepFunction& f, double q, const WeightSpec& w);

/// Level of the inner average (1/U(t)) int_0^t f u, exact via U-increments.
double f_double_star(const StepFunction& f, const Primitive& U, double t);

/// Norm of the inner average against weight v:
///   ( int_0^L ((1/U) int_0^t f u)^p v dt )^{1/p},
/// or ess sup of the averaged function times v when p = inf.  On the first
/// piece the average equals values[0] exactly and beyond the last break it is
/// mass/U, so those two contributions are evaluated in closed form; interior
/// pieces integrate adaptively.
ExtValue gamma_norm(const StepFunction& f, double p, const WeightSpec& u,
                    const WeightSpec& v);

struct OracleOptions {
    int n_steps = 64;              ///< finest number of pieces in the search
    long budget = 20000;           ///< cap on ratio evaluations in the ascent
    std::uint64_t seed = 0x5eed0f5eedULL;
    int restarts = 8;
};

struct OracleResult {
    ExtValue C_lb;                 ///< best ratio found: a lower bound on the optimal constant
    StepFunction witness;          ///< function achieving C_lb
    double phase1_best = 0.0;      ///< best single-indicator ratio
    long evaluations = 0;          ///< ascent ratio evaluations actually spent
};

/// Lower bound on the optimal constant of the embedding by maximizing the
/// norm ratio lambda/gamma over step functions.
///
/// Phase 1 scans indicators chi_[0,t) over a refined log grid; their ratio is
/// W(t)^{1/q} divided by the fundamental function to the power 1/p exactly.
/// Phase 2 runs coordinate ascent on (breaks, values) from `restarts` starts
/// (one warm start refining the phase-1 winner, the rest random), climbing a
/// resolution ladder 16, 32, ... up to n_steps.  Breaks are carried as inner-
/// primitive quantile fractions, so trajectories transport unchanged under
/// the unit-inner-weight substitution.  Each ladder level has a budget slice
/// and random stream keyed by (seed, restart, level) alone; a run with a
/// larger n_steps therefore replays the shorter run's levels exactly and can
/// only improve on it.  Degenerate problems (either kind) return zero with a
/// trivial witness.
OracleResult oracle_lower_bound(const EmbeddingProblem& prob,
                                const OracleOptions& opt = {});

/// Ratio of the two kernel forms for a nonnegative piecewise-constant density
/// h (p < inf, non-degenerate):
///
///   ( int_0^L (int_t^L h)^q w dt )^{1/q}
///   -----------------------------------------------
///   ( int_0^L (int_0^L U(s) h(s) / (U(s)+U(t)) ds)^p v dt )^{1/p}
///
/// h identically zero gives 0 by the 0/0 convention.  The ratio is exactly
/// invariant under h -> lambda h.
ExtValue kernel_ratio(const StepFunction& h, const EmbeddingProblem& prob);

/// Change of variable t -> (inner primitive)^{-1}: an equivalent problem on
/// (0, U(L)) with unit inner weight whose outer primitives match the original
/// ones pointwise (V_new(s) = V(U^{-1}(s)), same for W), so every constant
/// and every norm ratio is preserved.  When the inner weight is a single pure
/// power and an outer weight is built from zero-anchored pure-power pieces
/// the transform stays symbolic (powers map to powers); anything else becomes
/// a custom density v(U^{-1})/u(U^{-1}) carrying the exact composed primitive
/// as its hint.
EmbeddingProblem reduce_to_unit_u(const EmbeddingProblem& prob);

/// t with U(t) = target, by closed form for a single pure-power density and
/// by safeguarded Newton/bisection otherwise.  Clamps to [0, L].
double inverse_primitive(const Primitive& U, double target);

}  // namespace lorembed

#endif
