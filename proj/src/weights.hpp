#ifndef LOREMBED_WEIGHTS_HPP
#define LOREMBED_WEIGHTS_HPP

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "extval.hpp"

namespace lorembed {

/// Weight densities on (0, L), L <= inf.
///
/// The catalog family is piecewise power-log: finitely many contiguous pieces
/// covering (0, L), each anchored at one end of the domain,
///
///   zero-anchored:  c * t^alpha * log(e/t)^beta
///   end-anchored:   c * (L-t)^alpha * log(e*L/(L-t))^beta   (finite L only)
///
/// The family is closed under the primitives and tail integrals the embedding
/// formulas need.  An opaque custom variant (arbitrary evaluable density with
/// a caller-asserted local-integrability flag and an optional closed-form
/// primitive) preserves generality at quadrature cost.  Pointwise values at
/// piece boundaries follow the right-limit convention.

enum class Anchor { Zero, End };

struct WeightPiece {
    double lo = 0.0;
    double hi = 0.0;
    Anchor anchor = Anchor::Zero;
    double c = 1.0;      ///< coefficient, >= 0 (zero makes the weight vanish on the piece)
    double alpha = 0.0;  ///< power exponent
    double beta = 0.0;   ///< log exponent; zero-anchored pieces with beta != 0 need hi <= e
};

class WeightSpec {
  public:
    // Single-piece weights covering all of (0, L).
    static WeightSpec power(double c, double alpha, double L);
    static WeightSpec powerlog(double c, double alpha, double beta, double L);
    static WeightSpec end_power(double c, double alpha, double L);
    static WeightSpec end_powerlog(double c, double alpha, double beta, double L);

    /// Contiguous ordered pieces covering (0, L); adjacent edges must match exactly.
    static WeightSpec piecewise(std::vector<WeightPiece> pieces, double L);

    /// Escape hatch: arbitrary density.  locally_integrable is asserted by the
    /// caller; primitive() refuses a density asserted non-integrable.  When
    /// primitive_hint is given it must be the exact antiderivative from 0.
    static WeightSpec custom(std::function<double(double)> density, double L,
                             bool locally_integrable,
                             std::function<double(double)> primitive_hint = {});

    double L() const { return L_; }
    bool is_custom() const { return static_cast<bool>(density_); }
    bool integrability_asserted() const { return custom_integrable_; }
    const std::vector<WeightPiece>& pieces() const { return pieces_; }
    const std::function<double(double)>& primitive_hint() const { return hint_; }

    /// Density value at interior t (right-limit convention at piece boundaries).
    double operator()(double t) const;

  private:
    WeightSpec() = default;
    double L_ = 1.0;
    std::vector<WeightPiece> pieces_;
    std::function<double(double)> density_;
    std::function<double(double)> hint_;
    bool custom_integrable_ = false;
};

/// Running integral V(t) = int_0^t w of a weight; houses U, V and W uniformly.
/// Construction fails ("not a weight") unless 0 < V(t) < inf on all of (0, L).
/// Immutable and safe to share across threads.
class Primitive {
  public:
    const WeightSpec& base() const;

    /// V(t) for t in [0, L]; V(0) = 0, V(L) allowed only when finite.
    double eval(double t) const;

    /// int_a^b w as a sum of per-piece differences (avoids prefix cancellation).
    double between(double a, double b) const;

    /// lim_{t->L-} V(t), possibly inf.
    ExtValue value_at_L() const;

    bool closed_form_available() const;

    /// Re-integrates the density by quadrature at `points` interior grid points
    /// and compares with eval; true when every point agrees to rel_tol.
    bool matches_quadrature(double rel_tol = 1e-10, int points = 32) const;

  private:
    friend Primitive primitive(const WeightSpec& w);
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Build the running integral of w.  Closed-form antiderivatives cover pieces
/// with beta in {0, 1} and all beta when alpha == -1; other pieces fall back
/// to quadrature.  Throws std::domain_error("not a weight ...") when V is
/// infinite or zero somewhere on the interior.
Primitive primitive(const WeightSpec& w);

/// int_t^L v(s) * U(s)^{-p} ds as an extended value.
/// Single pure-power v and u hit an exact closed form (including exact inf
/// decisions for L = inf); a divergent v with bounded U short-circuits to inf;
/// everything else integrates numerically with an endpoint walk at L.
ExtValue tail_integral(const WeightSpec& v, const Primitive& U, double p, double t);

/// True iff the underlying density is a.e. positive, so U is strictly
/// increasing and continuous: structural check on piece coefficients plus a
/// strict-increase scan of U at 64 grid points.
bool is_admissible(const Primitive& U);

/// Exponent shift (p, q) -> (p*m/(n-d), q*m/(n-d)) used when reducing an
/// m-th order Sobolev-type inequality in n variables with a d-dimensional
/// defect to a weighted Lorentz embedding.  Requires 1 <= m < n, 0 < d < n-m.
std::pair<double, double> sobolev_exponents(double p, double q, int m, int n, double d);

}  // namespace lorembed

#endif
