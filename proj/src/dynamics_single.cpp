#include "disent/dynamics_single.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace disent {

namespace {

void require_nonnegative_time(double t, const char* where) {
  if (!(t >= 0.0)) throw std::invalid_argument(std::string(where) + ": t must be >= 0");
}

// (1 - e^{-2 gamma t}) / (2 gamma), Taylor branch for |gamma t| < 1e-4.
double relaxation_length(double t, double gamma) {
  const double x = gamma * t;
  if (std::abs(x) < numerics::kSmallArgument) {
    return t * (1.0 - x + (2.0 / 3.0) * x * x - (1.0 / 3.0) * x * x * x +
                (2.0 / 15.0) * x * x * x * x);
  }
  return -std::expm1(-2.0 * gamma * t) / (2.0 * gamma);
}

}  // namespace

void SystemParams::validate() const {
  if (!(m > 0.0)) throw std::invalid_argument("mass must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(omega >= 0.0)) throw std::invalid_argument("omega must be >= 0");
  if (!(kT >= 0.0)) throw std::invalid_argument("kT must be >= 0");
}

Matrix2 DiffusionMatrix::phase() const {
  Matrix2 d;
  d << d_qq, d_qp, d_qp, d_pp;
  return d;
}

Matrix2 DiffusionMatrix::fourier() const {
  Matrix2 d;
  d << d_pp, -d_qp, -d_qp, d_qq;
  return d;
}

const char* to_string(FlowVariant variant) {
  return variant == FlowVariant::PaperPrinted ? "printed" : "ode";
}

bool lindblad_valid(const DiffusionMatrix& d, double m, double gamma) {
  if (!(m > 0.0)) throw std::invalid_argument("lindblad_valid: mass must be positive");
  if (!is_psd(d.phase())) return false;
  const double bound = gamma * gamma / (4.0 * m * m);
  return d.det() >= bound * (1.0 - 1e-14);
}

DiffusionMatrix minimal_diffusion(double m, double gamma, double kT) {
  if (!(m > 0.0) || !(kT > 0.0)) {
    throw std::invalid_argument("minimal_diffusion: m and kT must be positive");
  }
  if (!(gamma >= 0.0)) throw std::invalid_argument("minimal_diffusion: gamma must be >= 0");
  return {gamma / (8.0 * m * kT), 0.0, 2.0 * m * kT * gamma};
}

Matrix2 flow_free(double t, double m, double gamma, FlowVariant variant) {
  require_nonnegative_time(t, "flow_free");
  const double shear = -relaxation_length(t, gamma) / m;
  const double top_left = variant == FlowVariant::PaperPrinted ? 1.0 : std::exp(-2.0 * gamma * t);
  Matrix2 e;
  e << top_left, shear, 0.0, 1.0;
  return e;
}

Matrix2 characteristic_flow(double t, double m, double gamma, double omega,
                            FlowVariant variant) {
  const double a2 = omega * omega - gamma * gamma;
  const double v = numerics::damped_trig(a2, gamma, t).sinc_part;
  const double sign = variant == FlowVariant::PaperPrinted ? 1.0 : -1.0;
  Matrix2 e;
  e << numerics::damped_combination(a2, gamma, sign * gamma, t), -v / m, m * omega * omega * v,
      numerics::damped_combination(a2, gamma, gamma, t);
  return e;
}

Matrix2 flow_oscillator(double t, double m, double gamma, double omega, FlowVariant variant) {
  require_nonnegative_time(t, "flow_oscillator");
  if (!(omega >= 0.0)) throw std::invalid_argument("flow_oscillator: omega must be >= 0");
  return characteristic_flow(t, m, gamma, omega, variant);
}

Matrix2 characteristic_drift(double m, double gamma, double omega) {
  Matrix2 f;
  f << -2.0 * gamma, -1.0 / m, m * omega * omega, 0.0;
  return f;
}

Matrix2 phase_drift(double m, double gamma, double omega) {
  Matrix2 f;
  f << 0.0, 1.0 / m, -m * omega * omega, -2.0 * gamma;
  return f;
}

Cov2 mu_closed_free(double t, const DiffusionMatrix& d, double m, double gamma) {
  require_nonnegative_time(t, "mu_closed_free");
  const double x = 2.0 * gamma * t;
  const double shear_1 = t * t * numerics::phi2(x) / m;                 // int f
  const double shear_2 = t * t * t * numerics::phi3(x) / (2.0 * m * m);  // int f^2
  Matrix2 out;
  out(0, 0) = 2.0 * (d.d_pp * shear_2 + 2.0 * d.d_qp * shear_1 + d.d_qq * t);
  out(0, 1) = out(1, 0) = 2.0 * (d.d_pp * shear_1 + d.d_qp * t);
  out(1, 1) = 2.0 * d.d_pp * t;
  return Cov2(out);
}

namespace detail {

namespace {

// int_0^t s^k e^{-2 gamma s} ds / k! = base^{k+1} * reduced_moment(k), with
// base = t while 2 gamma t < 1 and base = 1 / (2 gamma) afterwards, so that
// powers of base combine with powers of a^2 without overflow.
struct MomentScale {
  double t;
  double gamma;

  bool short_time() const { return 2.0 * gamma * t < 1.0; }
  double base() const { return short_time() ? t : 1.0 / (2.0 * gamma); }
  double reduced_moment(int k) const {
    const double w = 2.0 * gamma * t;
    if (!short_time()) return boost::math::gamma_p(k + 1.0, w);
    double value = numerics::unit_moment(k, w);
    for (int j = 2; j <= k; ++j) value /= j;
    return value;
  }
};

}  // namespace

TrigIntegrals trig_integrals(double t, double gamma, double a2) {
  const double k0 = t * numerics::exprel(-2.0 * gamma * t);
  const double h2 = -4.0 * a2;
  const double h_abs = 2.0 * std::sqrt(std::abs(a2));
  const double scale = gamma > 0.0 ? std::min(t, 1.0 / (2.0 * gamma)) : t;
  double kc = 0.0;
  double ks = 0.0;
  double kv = 0.0;
  if (h_abs * scale < 0.5) {
    const MomentScale moments{t, gamma};
    const double base = moments.base();
    const double ratio = h2 * base * base;
    double ratio_pow = 1.0;       // (h^2 base^2)^j
    double ratio_pow_prev = 0.0;  // (h^2 base^2)^(j-1)
    for (int j = 0; j < 200; ++j) {
      const double ks_term = ratio_pow * base * base * moments.reduced_moment(2 * j + 1);
      ks += ks_term;
      double kv_term = 0.0;
      if (j >= 1) {
        kv_term = 2.0 * ratio_pow_prev * base * base * base * moments.reduced_moment(2 * j);
        kv += kv_term;
      }
      if (j >= 2 && std::abs(ks_term) <= 1e-18 * std::abs(ks) &&
          std::abs(kv_term) <= 1e-18 * std::abs(kv)) {
        break;
      }
      ratio_pow_prev = ratio_pow;
      ratio_pow *= ratio;
    }
    kc = k0 + 0.5 * h2 * kv;
  } else {
    using Complex = std::complex<double>;
    const Complex h = a2 > 0.0 ? Complex(0.0, h_abs) : Complex(h_abs, 0.0);
    const Complex x(-2.0 * gamma, 0.0);
    auto g = [t](Complex lambda) { return t * numerics::exprel(lambda * t); };
    const Complex plus = g(x + h);
    const Complex minus = g(x - h);
    kc = (0.5 * (plus + minus)).real();
    ks = ((plus - minus) / (2.0 * h)).real();
    kv = 2.0 * (kc - k0) / h2;
  }
  return {0.5 * (k0 + kc), ks, kv};
}

}  // namespace detail

Cov2 mu_closed(double t, const DiffusionMatrix& d, double m, double gamma, double omega,
               FlowVariant variant) {
  require_nonnegative_time(t, "mu_closed");
  const auto ints = detail::trig_integrals(t, gamma, omega * omega - gamma * gamma);
  // Flow entries as linear forms (coefficient of u, coefficient of v) in
  // u = e^{-gamma s} cos(a s), v = e^{-gamma s} sin(a s) / a.
  using Form = std::array<double, 2>;
  const double sign = variant == FlowVariant::PaperPrinted ? 1.0 : -1.0;
  const Form forms[2][2] = {{Form{1.0, sign * gamma}, Form{0.0, -1.0 / m}},
                            {Form{0.0, m * omega * omega}, Form{1.0, gamma}}};
  auto product_integral = [&](const Form& p, const Form& q) {
    return p[0] * q[0] * ints.uu + (p[0] * q[1] + p[1] * q[0]) * ints.uv + p[1] * q[1] * ints.vv;
  };
  const Matrix2 dbar = d.fourier();
  Matrix2 mu = Matrix2::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          if (dbar(k, l) != 0.0) mu(i, j) += dbar(k, l) * product_integral(forms[k][i], forms[l][j]);
        }
      }
    }
  }
  return Cov2(mu);
}

Cov2 mu_quadrature(double t, const DiffusionMatrix& d, const FlowFunction& flow, int n_min) {
  require_nonnegative_time(t, "mu_quadrature");
  const Matrix2 dbar = d.fourier();
  const Matrix2 mu = numerics::integrate(
      [&](double s) -> Matrix2 {
        const Matrix2 e = flow(s);
        return e.transpose() * dbar * e;
      },
      0.0, t, n_min);
  return Cov2(mu);
}

Propagator make_propagator(double t, const SystemParams& params, const DiffusionMatrix& d,
                           FlowVariant variant) {
  params.validate();
  require_nonnegative_time(t, "make_propagator");
  Propagator prop;
  prop.t = t;
  prop.variant = variant;
  prop.flow = params.omega == 0.0 ? flow_free(t, params.m, params.gamma, variant)
                                  : flow_oscillator(t, params.m, params.gamma, params.omega, variant);
  prop.epsilon = eta().transpose() * prop.flow.transpose() * eta();
  prop.mu = mu_closed(t, d, params.m, params.gamma, params.omega, variant);
  prop.noise = Cov2(2.0 * eta_conjugate(prop.mu.matrix()));
  prop.det_flow = prop.flow.determinant();
  return prop;
}

GaussianState1 propagate_gaussian(const GaussianState1& state, const Propagator& prop) {
  if (std::abs(prop.epsilon.determinant()) == 0.0) {
    throw std::domain_error("propagate_gaussian: singular flow");
  }
  GaussianState1 out;
  out.kind = state.kind;
  out.mean = prop.epsilon * state.mean;
  out.cov = Cov2(prop.epsilon * state.cov.matrix() * prop.epsilon.transpose()) + prop.noise;
  return out;
}

GaussianState1 moment_ode_oracle(const GaussianState1& state, const SystemParams& params,
                                 const DiffusionMatrix& d, double t, int steps) {
  params.validate();
  if (steps < 1) throw std::invalid_argument("moment_ode_oracle: steps must be >= 1");
  return integrate_moments<2>(state, phase_drift(params.m, params.gamma, params.omega),
                              d.phase(), t, steps);
}

}  // namespace disent
