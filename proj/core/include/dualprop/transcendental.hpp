#pragma once

// Elementary functions lifted to dual arguments through
//   f(a + b eps) = f(a) + b f'(a) eps,
// which is what the Taylor series of an analytic f collapses to once every
// eps^k with k >= 2 vanishes.

#include <cmath>
#include <utility>

#include "dualprop/dual.hpp"

namespace dualprop {

/// Generic lifting rule. Throws DomainError when f or fprime is not finite
/// at re(x).
template <class F, class FPrime>
Dual lift(F&& f, FPrime&& fprime, const Dual& x) {
  const double value = std::forward<F>(f)(x.re());
  const double slope = std::forward<FPrime>(fprime)(x.re());
  if (!std::isfinite(value) || !std::isfinite(slope)) {
    throw DomainError("lift: function or derivative not finite at the evaluation point");
  }
  return Dual::unchecked(value, x.du() * slope);
}

Dual sin(const Dual& x);
Dual cos(const Dual& x);
Dual exp(const Dual& x);
/// Natural logarithm; re(x) must be positive.
Dual log(const Dual& x);
Dual tanh(const Dual& x);
Dual sigmoid(const Dual& x);

/// Logistic function 1/(1+exp(-z)), branched on sign(z) so exp never
/// overflows.
double sigmoid(double z) noexcept;
/// sigma(z) * (1 - sigma(z)) evaluated as exp(-|z|)/(1+exp(-|z|))^2, which
/// avoids the cancellation in 1 - sigma(z) for large z.
double sigmoid_slope(double z) noexcept;
/// 1 - tanh(z)^2 evaluated as 1/cosh(z)^2.
double tanh_slope(double z) noexcept;

}  // namespace dualprop
