#include "dualprop/dual.hpp"

#include <ostream>

namespace dualprop {

namespace {

double ipow(double base, std::uint32_t n) noexcept {
  double result = 1.0;
  while (n != 0) {
    if (n & 1u) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

}  // namespace

Dual pow(const Dual& x, std::uint32_t n) noexcept {
  if (n == 0) return Dual::unchecked(1.0, 0.0);
  const double lower = ipow(x.re(), n - 1);
  return Dual::unchecked(lower * x.re(), static_cast<double>(n) * lower * x.du());
}

std::ostream& operator<<(std::ostream& os, const Dual& d) {
  os << d.re() << (std::signbit(d.du()) ? " - " : " + ") << std::fabs(d.du()) << "eps";
  return os;
}

}  // namespace dualprop
