#pragma once

/**
 * @file dual.hpp
 * @brief Dual numbers a + b*eps with eps^2 = 0.
 *
 * Evaluating a polynomial (or any analytic function, see transcendental.hpp)
 * at x + 1*eps yields f(x) + f'(x)*eps, so the eps coefficient carries a
 * first derivative through ordinary arithmetic.
 *
 * @code
 * using dualprop::Dual;
 * Dual x = Dual::variable(3.0);      // 3 + 1eps
 * Dual y = x * x + 2.0 * x;          // 15 + 8eps
 * // y.re() == 15, y.du() == 8
 * @endcode
 */

#include <cmath>
#include <cstdint>
#include <iosfwd>

#include "dualprop/errors.hpp"

namespace dualprop {

class Dual {
 public:
  /// Zero element 0 + 0eps.
  constexpr Dual() noexcept = default;

  /// Checked construction; throws NonFiniteError for NaN or infinite parts.
  Dual(double re, double du = 0.0) : re_(re), du_(du) {  // NOLINT(google-explicit-constructor)
    if (!std::isfinite(re) || !std::isfinite(du)) {
      throw NonFiniteError("Dual: non-finite component");
    }
  }

  static Dual make(double re, double du) { return Dual(re, du); }
  /// x + 1eps: the seed for differentiating with respect to x.
  static Dual variable(double x, double seed = 1.0) { return Dual(x, seed); }
  /// The nilpotent generator eps = 0 + 1eps.
  static constexpr Dual epsilon() noexcept { return unchecked(0.0, 1.0); }

  /// No validation. Arithmetic results go through this path; overflow shows
  /// up as a non-finite part which is_finite() reports.
  static constexpr Dual unchecked(double re, double du) noexcept {
    Dual d;
    d.re_ = re;
    d.du_ = du;
    return d;
  }

  constexpr double re() const noexcept { return re_; }
  constexpr double du() const noexcept { return du_; }
  bool is_finite() const noexcept { return std::isfinite(re_) && std::isfinite(du_); }

  constexpr Dual operator-() const noexcept { return unchecked(-re_, -du_); }

  constexpr Dual& operator+=(const Dual& o) noexcept {
    re_ += o.re_;
    du_ += o.du_;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) noexcept {
    re_ -= o.re_;
    du_ -= o.du_;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) noexcept {
    *this = *this * o;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    *this = *this / o;
    return *this;
  }

  friend constexpr Dual operator+(const Dual& x, const Dual& y) noexcept {
    return unchecked(x.re_ + y.re_, x.du_ + y.du_);
  }
  friend constexpr Dual operator-(const Dual& x, const Dual& y) noexcept {
    return unchecked(x.re_ - y.re_, x.du_ - y.du_);
  }

  // (a+b eps)(c+d eps) = ac + (ad+bc) eps. The eps^2 term is never formed.
  // Adding +0.0 maps a -0.0 result to +0.0 so eps*eps is bit-identical to 0.
  friend constexpr Dual operator*(const Dual& x, const Dual& y) noexcept {
    return unchecked(x.re_ * y.re_ + 0.0, (x.re_ * y.du_ + x.du_ * y.re_) + 0.0);
  }

  friend Dual operator/(const Dual& x, const Dual& y) {
    if (std::fabs(y.re_) < kSingularTolerance) {
      throw DivisionByNonUnit("Dual: divisor has zero real part");
    }
    const double q = x.re_ / y.re_;
    return unchecked(q, (x.du_ - q * y.du_) / y.re_);
  }

  // Scalars embed as s + 0eps; these overloads skip the zero products.
  friend constexpr Dual operator+(const Dual& x, double s) noexcept { return unchecked(x.re_ + s, x.du_); }
  friend constexpr Dual operator+(double s, const Dual& x) noexcept { return unchecked(s + x.re_, x.du_); }
  friend constexpr Dual operator-(const Dual& x, double s) noexcept { return unchecked(x.re_ - s, x.du_); }
  friend constexpr Dual operator-(double s, const Dual& x) noexcept { return unchecked(s - x.re_, -x.du_); }
  friend constexpr Dual operator*(const Dual& x, double s) noexcept { return unchecked(x.re_ * s, x.du_ * s); }
  friend constexpr Dual operator*(double s, const Dual& x) noexcept { return unchecked(s * x.re_, s * x.du_); }
  friend Dual operator/(const Dual& x, double s) { return x / Dual::unchecked(s, 0.0); }
  friend Dual operator/(double s, const Dual& x) { return Dual::unchecked(s, 0.0) / x; }

  /// Exact componentwise equality (both parts).
  friend constexpr bool operator==(const Dual& x, const Dual& y) noexcept {
    return x.re_ == y.re_ && x.du_ == y.du_;
  }

  /// Divisors with |re| below this are rejected. Only genuine underflow
  /// trips it; conditioning policy belongs to callers.
  static constexpr double kSingularTolerance = 1e-300;

 private:
  double re_ = 0.0;
  double du_ = 0.0;
};

/// Real part R(d) = a of d = a + b eps.
constexpr double real_part(const Dual& d) noexcept { return d.re(); }
/// Dual part E(d) = b of d = a + b eps.
constexpr double dual_part(const Dual& d) noexcept { return d.du(); }

/// (a + b eps)^n = a^n + n a^(n-1) b eps, with 0^0 = 1.
Dual pow(const Dual& x, std::uint32_t n) noexcept;

std::ostream& operator<<(std::ostream& os, const Dual& d);

}  // namespace dualprop
