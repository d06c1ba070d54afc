#ifndef LOREMBED_DISCRETIZATION_HPP
#define LOREMBED_DISCRETIZATION_HPP

#include <string>
#include <vector>

#include "quasiconcave.hpp"

namespace lorembed {

// Both sides of the equivalence between a weighted sum over covering-sequence
// points and the measure-form integral.  Within universal constants (depending
// only on p, a, C1, C2),
//   sum_k f(x_k) h^p(x_k) / rho^p(x_k)
//     ~ alpha^p lim_{0+} f/rho^p + beta^p lim_{L-} f
//       + int f(t) rho^{1-p}(t) (int min{rho(t),rho(s)} dnu(s))^{p-1} dnu(t)
// where the sum runs over every point including the sentinels 0 and L, whose
// terms are one-sided limits.  f must itself be rho^p-quasiconcave; the
// triples below accept arbitrary nonnegative f.  A sufficient growth factor
// is a^p > 12*3^{p+max(1,p)} C2^p / (min(1,p) C1^p); a smaller a yields a
// warning but the sides are still computed.
struct SidesResult {
    ExtValue discrete_sum;
    ExtValue measure_form;
    std::vector<std::string> warnings;
};

SidesResult sum_integral_equivalence(const RealFn& f, const RepMeasure& rep,
                                     const CoveringSequence& cs, double p);

/// The sufficient growth factor for sum_integral_equivalence at this p, C1, C2.
double sufficient_growth_factor(double p, double C1, double C2);

// Three mutually equivalent quantities built from suprema (constants depend
// only on p and a; requires a > 108*C2/C1):
//   interval_part:  sum over intervals of (sup on (x_{k-1},x_k] of
//                   (h/rho)^{1/p} f)^p
//   kernel_part:    sum over points (sentinels as limits) of
//                   h(x_k) (sup_t f(t)/(rho^{1/p}(x_k)+rho^{1/p}(t)))^p
//   measure_part:   alpha (sup f/rho^{1/p})^p + beta (sup f)^p
//                   + int (sup_tau rho^{1/p}(t) f(tau)
//                          /(rho^{1/p}(t)+rho^{1/p}(tau)))^p dnu(t)
struct TripleResult {
    ExtValue interval_part;
    ExtValue kernel_part;
    ExtValue measure_part;
    std::vector<std::string> warnings;
};

TripleResult sup_partition_triple(const RealFn& f, const RepMeasure& rep,
                                  const CoveringSequence& cs, double p);

/// Same three-way equivalence with integrals in place of suprema:
///   interval_part: sum over intervals of (int (h/rho)^{1/p} f)^p
///   kernel_part:   sum over points of h(x_k) (int f/(rho^{1/p}(x_k)+rho^{1/p}))^p
///   measure_part:  alpha (int f/rho^{1/p})^p + beta (int f)^p
///                  + int (int rho^{1/p}(t) f(s)/(rho^{1/p}(t)+rho^{1/p}(s)) ds)^p dnu(t)
TripleResult integral_partition_triple(const RealFn& f, const RepMeasure& rep,
                                       const CoveringSequence& cs, double p);

// Equivalent suprema of the kernel integral against a rho-quasiconcave phi
// (any a > 1; constants depend only on p and a):
//   continuous_sup: sup_t phi(t) (int f(s)/(rho^{1/p}(t)+rho^{1/p}(s)) ds)^p
//   point_sup:      the same restricted to covering-sequence points
//                   (sentinels as limits)
//   interval_sup:   max over intervals of (int (phi/rho)^{1/p} f)^p
struct SupTripleResult {
    ExtValue continuous_sup;
    ExtValue point_sup;
    ExtValue interval_sup;
    std::vector<std::string> warnings;
};

SupTripleResult kernel_sup_triple(const RealFn& f, const RealFn& phi,
                                  const CoveringSequence& cs, double p);

}  // namespace lorembed

#endif
