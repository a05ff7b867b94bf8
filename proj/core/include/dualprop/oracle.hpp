#pragma once

// Reference gradients that share no arithmetic with Dual: closed-form
// backpropagation and central finite differences. compare() grades one
// gradient against another.

#include <cstddef>
#include <string>

#include "dualprop/model.hpp"

namespace dualprop {

/// dW = 2(yhat - y) act'(z) x, db = 2(yhat - y) act'(z), z = W x + b.
Gradient grad_backprop_analytic(const Perceptron& m, const Sample& s);
/// Layer-by-layer reverse accumulation for dense networks.
Gradient grad_backprop_analytic(const Mlp& m, const Sample& s);

inline constexpr double kDefaultFiniteDifferenceStep = 1e-6;

/// (L(p + h) - L(p - h)) / 2h for every parameter p. Losses are evaluated in
/// quad precision where the compiler provides it, so the rounding error of
/// the difference stays far below the truncation error of the stencil.
Gradient grad_finite_difference(const Perceptron& m, const Sample& s,
                                double h = kDefaultFiniteDifferenceStep);
Gradient grad_finite_difference(const Mlp& m, const Sample& s,
                                double h = kDefaultFiniteDifferenceStep);

/// Magnitude below which compare() falls back to absolute error.
inline constexpr double kAbsoluteFallback = 1e-8;

/// |a - b| / max(|a|, |b|), or |a - b| when both magnitudes are below
/// kAbsoluteFallback.
double scaled_error(double a, double b) noexcept;

struct GradReport {
  Gradient grad_a;
  Gradient grad_b;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;  // maximum scaled_error over all entries
  std::string worst_index;   // Gradient::path of the worst entry
  double tolerance = 0.0;
  bool pass = true;
};

/// Throws ShapeError when a and b are shaped differently.
GradReport compare(const Gradient& a, const Gradient& b, double tol);

}  // namespace dualprop
