#include "disent/numerics.hpp"

#include <numbers>

namespace disent::numerics {

double exprel(double z) {
  if (z == 0.0) return 1.0;
  return std::expm1(z) / z;
}

std::complex<double> exprel(std::complex<double> z) {
  if (std::abs(z) >= 0.5) return (std::exp(z) - 1.0) / z;
  std::complex<double> term = 1.0;
  std::complex<double> sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= z / static_cast<double>(k + 1);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double phi2(double x) {
  if (std::abs(x) >= 1.0) return (x - 1.0 + std::exp(-x)) / (x * x);
  // sum_k (-x)^k / (k + 2)!
  double term = 0.5;
  double sum = term;
  for (int k = 1; k < 40; ++k) {
    term *= -x / (k + 2);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double phi3(double x) {
  if (std::abs(x) >= 1.0) {
    return (2.0 * x + 4.0 * std::exp(-x) - std::exp(-2.0 * x) - 3.0) / (x * x * x);
  }
  // sum_{n >= 3} (-1)^n (4 - 2^n) x^{n-3} / n!
  double sum = 0.0;
  double x_pow = 1.0;
  double factorial = 6.0;
  double two_pow = 8.0;
  double sign = -1.0;
  for (int n = 3; n < 45; ++n) {
    const double term = sign * (4.0 - two_pow) * x_pow / factorial;
    sum += term;
    if (n > 3 && std::abs(term) < 1e-18 * std::abs(sum)) break;
    x_pow *= x;
    factorial *= n + 1;
    two_pow *= 2.0;
    sign = -sign;
  }
  return sum;
}

double unit_moment(int k, double w) {
  if (k < 0 || w < 0.0) throw std::invalid_argument("unit_moment: need k >= 0 and w >= 0");
  if (w <= std::max(40.0, 2.0 * k)) {
    // e^{-w} sum_n w^n / ((k+1)(k+2)...(k+n+1)), all terms positive.
    double term = 1.0 / (k + 1);
    double sum = term;
    for (int n = 1; n < 2000; ++n) {
      term *= w / (k + n + 1);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return std::exp(-w) * sum;
  }
  // Upward recurrence is stable once w exceeds k.
  const double decay = std::exp(-w);
  double value = -std::expm1(-w) / w;
  for (int j = 1; j <= k; ++j) value = (j * value - decay) / w;
  return value;
}

double cos_cont(double a2, double t) {
  const double at = std::sqrt(std::abs(a2)) * std::abs(t);
  if (at < kSmallArgument) {
    const double x = a2 * t * t;
    return 1.0 - x / 2.0 + x * x / 24.0;
  }
  const double a = std::sqrt(std::abs(a2));
  return a2 > 0.0 ? std::cos(a * t) : std::cosh(a * t);
}

double sinc_cont(double a2, double t) {
  const double at = std::sqrt(std::abs(a2)) * std::abs(t);
  if (at < kSmallArgument) {
    const double x = a2 * t * t;
    return t * (1.0 - x / 6.0 + x * x / 120.0);
  }
  const double a = std::sqrt(std::abs(a2));
  return a2 > 0.0 ? std::sin(a * t) / a : std::sinh(a * t) / a;
}

DampedTrig damped_trig(double a2, double gamma, double t) {
  const double b = std::sqrt(std::abs(a2));
  if (a2 < 0.0 && b * std::abs(t) > 1.0) {
    const double grow = std::exp((b - gamma) * t);
    const double decay = std::exp(-(b + gamma) * t);
    return {0.5 * (grow + decay), 0.5 * (grow - decay) / b};
  }
  const double envelope = std::exp(-gamma * t);
  return {envelope * cos_cont(a2, t), envelope * sinc_cont(a2, t)};
}

double damped_combination(double a2, double gamma, double c, double t) {
  const double b = std::sqrt(std::abs(a2));
  if (a2 < 0.0 && b * std::abs(t) > 1.0) {
    const double grow = std::exp((b - gamma) * t);
    const double decay = std::exp(-(b + gamma) * t);
    return ((b + c) * grow + (b - c) * decay) / (2.0 * b);
  }
  const auto [cos_part, sinc_part] = damped_trig(a2, gamma, t);
  return cos_part + c * sinc_part;
}

namespace {

GaussLegendreRule<10> make_rule() {
  constexpr int n = 10;
  GaussLegendreRule<n> rule;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
  }
  return rule;
}

}  // namespace

const GaussLegendreRule<10>& gauss_legendre_10() {
  static const GaussLegendreRule<10> rule = make_rule();
  return rule;
}

}  // namespace disent::numerics
