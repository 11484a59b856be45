#include "mcmix/special.hpp"

#include <cmath>
#include <string>

#include "mcmix/errors.hpp"

namespace mcmix {

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma requires x > 0, got " + std::to_string(x));
  if (std::isinf(x)) return x;

  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // B_2n / (2n) for n = 1..7
  const double inv2 = 1.0 / (x * x);
  const double series =
      inv2 * (1.0 / 12.0 -
      inv2 * (1.0 / 120.0 -
      inv2 * (1.0 / 252.0 -
      inv2 * (1.0 / 240.0 -
      inv2 * (1.0 / 132.0 -
      inv2 * (691.0 / 32760.0 -
      inv2 * (1.0 / 12.0)))))));
  return (std::log(x) - 0.5 / x - series) + shift;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0, got " + std::to_string(x));
  return std::lgamma(x);
}

double log_beta(std::span<const double> a) {
  double total = 0.0;
  double out = 0.0;
  for (double v : a) {
    if (!(v > 0.0)) throw DomainError("log_beta requires positive entries, got " + std::to_string(v));
    out += std::lgamma(v);
    total += v;
  }
  if (a.empty()) return 0.0;
  return out - std::lgamma(total);
}

double log_beta(const Eigen::VectorXd& a) { return log_beta(std::span<const double>(a.data(), a.size())); }

}  // namespace mcmix
