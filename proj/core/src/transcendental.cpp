#include "dualprop/transcendental.hpp"

namespace dualprop {

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sigmoid_slope(double z) noexcept {
  const double e = std::exp(-std::fabs(z));
  const double denom = 1.0 + e;
  return e / (denom * denom);
}

double tanh_slope(double z) noexcept {
  const double c = std::cosh(z);
  return 1.0 / (c * c);
}

Dual sin(const Dual& x) {
  return lift([](double a) { return std::sin(a); }, [](double a) { return std::cos(a); }, x);
}

Dual cos(const Dual& x) {
  return lift([](double a) { return std::cos(a); }, [](double a) { return -std::sin(a); }, x);
}

Dual exp(const Dual& x) {
  const double e = std::exp(x.re());
  return lift([e](double) { return e; }, [e](double) { return e; }, x);
}

Dual log(const Dual& x) {
  if (!(x.re() > 0.0)) throw DomainError("log: real part must be positive");
  return lift([](double a) { return std::log(a); }, [](double a) { return 1.0 / a; }, x);
}

Dual tanh(const Dual& x) {
  return lift([](double a) { return std::tanh(a); }, tanh_slope, x);
}

Dual sigmoid(const Dual& x) {
  return lift([](double a) { return sigmoid(a); }, [](double a) { return sigmoid_slope(a); }, x);
}

}  // namespace dualprop
