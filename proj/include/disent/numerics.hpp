#pragma once

// Special functions and quadrature shared by the closed forms and oracles.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace disent::numerics {

/// (e^z - 1) / z, entire, with value 1 at z = 0.
double exprel(double z);
std::complex<double> exprel(std::complex<double> z);

/// (x - 1 + e^{-x}) / x^2, equal to 1/2 at x = 0.
double phi2(double x);
/// (2x + 4 e^{-x} - e^{-2x} - 3) / x^3, equal to 2/3 at x = 0.
double phi3(double x);

/// Integral of s^k e^{-w s} over [0, 1] for w >= 0.
double unit_moment(int k, double w);

/// cos(a t) with a = sqrt(a2), continued to cosh(sqrt(-a2) t) for a2 < 0.
double cos_cont(double a2, double t);
/// sin(a t) / a with a = sqrt(a2), continued to sinh for a2 < 0 and to t at a2 = 0.
double sinc_cont(double a2, double t);

/// e^{-gamma t} cos_cont and e^{-gamma t} sinc_cont without intermediate
/// overflow in the overdamped branch.
struct DampedTrig {
  double cos_part;
  double sinc_part;
};
DampedTrig damped_trig(double a2, double gamma, double t);

/// cos_part + c * sinc_part of damped_trig. In the overdamped branch the two
/// exponentials are combined first, so c = gamma at a2 = -gamma^2 gives the
/// exact constant instead of a difference of two large numbers.
double damped_combination(double a2, double gamma, double c, double t);

/// Threshold on |a t| below which cos_cont / sinc_cont use their Taylor branch.
inline constexpr double kSmallArgument = 1e-4;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
template <int N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};
};

const GaussLegendreRule<10>& gauss_legendre_10();

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class Value>
Value zero_like() {
  if constexpr (std::is_arithmetic_v<Value>) {
    return Value(0);
  } else {
    return Value::Zero();
  }
}

template <class Value>
double max_abs(const Value& v) {
  if constexpr (std::is_arithmetic_v<Value>) {
    return std::abs(v);
  } else {
    return v.cwiseAbs().maxCoeff();
  }
}

}  // namespace detail

/// Composite 10-point Gauss-Legendre integral of a scalar or matrix function,
/// doubling the panel count from `min_panels` until two successive results
/// agree to `rel_tol` relative to max(1, max |entry|).
template <class F>
auto integrate(F&& f, double a, double b, int min_panels = 4, double rel_tol = 1e-10,
               int max_panels = 1 << 17) {
  using Value = std::decay_t<decltype(f(a))>;
  const auto& rule = gauss_legendre_10();
  auto composite = [&](int panels) {
    Value sum = detail::zero_like<Value>();
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * width;
      for (int k = 0; k < 10; ++k) {
        sum += (rule.weights[k] * 0.5 * width) * f(mid + 0.5 * width * rule.nodes[k]);
      }
    }
    return sum;
  };
  if (b == a) return detail::zero_like<Value>();
  int panels = std::max(1, min_panels);
  Value previous = composite(panels);
  while (panels < max_panels) {
    panels *= 2;
    Value current = composite(panels);
    const double scale = std::max(1.0, detail::max_abs(current));
    if (detail::max_abs(Value(current - previous)) <= rel_tol * scale) return current;
    previous = current;
  }
  throw QuadratureError("integrate: no convergence with " + std::to_string(max_panels) +
                        " panels");
}

}  // namespace disent::numerics
