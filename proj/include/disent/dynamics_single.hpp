#pragma once

// Single-particle quantum Fokker-Planck dynamics: diffusion, characteristic
// flows, the noise integral and Gaussian propagation.

#include "disent/numerics.hpp"
#include "disent/phase_space.hpp"

#include <functional>

namespace disent {

struct SystemParams {
  double m = 1.0;
  double gamma = 0.0;
  /// Well frequency; 0 is the free particle.
  double omega = 0.0;
  double kT = 0.0;

  /// Throws std::invalid_argument unless m > 0 and gamma, omega, kT >= 0.
  void validate() const;
};

/// Symmetric diffusion coefficients of the master equation.
struct DiffusionMatrix {
  double d_qq = 0.0;
  double d_qp = 0.0;
  double d_pp = 0.0;

  /// [[d_qq, d_qp], [d_qp, d_pp]], the phase-space diffusion.
  Matrix2 phase() const;
  /// [[d_pp, -d_qp], [-d_qp, d_qq]], the matrix seen by the Fourier transform.
  Matrix2 fourier() const;
  double det() const { return d_qq * d_pp - d_qp * d_qp; }
  bool is_zero() const { return d_qq == 0.0 && d_qp == 0.0 && d_pp == 0.0; }
};

enum class FlowVariant { PaperPrinted, OdeConsistent };

const char* to_string(FlowVariant variant);

struct Propagator {
  double t = 0.0;
  FlowVariant variant = FlowVariant::PaperPrinted;
  Matrix2 flow = Matrix2::Identity();     // E_t
  Matrix2 epsilon = Matrix2::Identity();  // eta^T E_t^T eta
  Cov2 mu;
  Cov2 noise;  // 2 eta^T mu eta
  double det_flow = 1.0;
};

/// D >= 0 and det D >= gamma^2 / (4 m^2), with a relative slack of 1e-14 so
/// the minimal diffusion sits on the boundary.
bool lindblad_valid(const DiffusionMatrix& d, double m, double gamma);

DiffusionMatrix minimal_diffusion(double m, double gamma, double kT);

/// Free-particle flow. PaperPrinted keeps the top-left entry at 1.
Matrix2 flow_free(double t, double m, double gamma, FlowVariant variant);

/// Damped-oscillator flow. At omega = 0 it coincides with flow_free.
Matrix2 flow_oscillator(double t, double m, double gamma, double omega, FlowVariant variant);

/// The same formula as flow_oscillator, evaluated at any real t. For the
/// OdeConsistent variant this is the group element, so negative t inverts.
Matrix2 characteristic_flow(double t, double m, double gamma, double omega, FlowVariant variant);

/// Characteristic drift [[-2 gamma, -1/m], [m omega^2, 0]]; the OdeConsistent
/// flow is its exponential.
Matrix2 characteristic_drift(double m, double gamma, double omega);

/// Phase-space drift [[0, 1/m], [-m omega^2, -2 gamma]].
Matrix2 phase_drift(double m, double gamma, double omega);

/// M_t = 2 eta^T mu_t eta for the printed free flow.
Cov2 mu_closed_free(double t, const DiffusionMatrix& d, double m, double gamma);

/// mu_t = int_0^t E_s^T Dbar E_s ds in closed form, for either flow variant,
/// any omega >= 0 (overdamped included) and a full diffusion matrix.
Cov2 mu_closed(double t, const DiffusionMatrix& d, double m, double gamma, double omega,
               FlowVariant variant);

using FlowFunction = std::function<Matrix2(double)>;

/// Quadrature oracle for mu_t. Throws numerics::QuadratureError when the
/// refinement cap is hit.
Cov2 mu_quadrature(double t, const DiffusionMatrix& d, const FlowFunction& flow, int n_min = 4);

Propagator make_propagator(double t, const SystemParams& params, const DiffusionMatrix& d,
                           FlowVariant variant);

/// mean_t = epsilon_t mean_0, cov_t = epsilon_t cov_0 epsilon_t^T + M_t.
GaussianState1 propagate_gaussian(const GaussianState1& state, const Propagator& prop);

/// RK4 integration of d<z>/dt = F<z>, dS/dt = F S + S F^T + 2 D_phase.
/// Starts from `steps` and doubles until two runs agree to 1e-10 relative.
template <int Dim>
GaussianState<Dim> integrate_moments(const GaussianState<Dim>& state,
                                     const SquareMatrix<Dim>& drift,
                                     const SquareMatrix<Dim>& diffusion_phase, double t,
                                     int steps, int max_steps = 1 << 22) {
  using Mat = SquareMatrix<Dim>;
  using Vec = ColVector<Dim>;
  auto run = [&](int n) {
    const double h = t / n;
    Vec mean = state.mean;
    Mat cov = state.cov.matrix();
    auto dcov = [&](const Mat& s) -> Mat {
      return drift * s + s * drift.transpose() + 2.0 * diffusion_phase;
    };
    for (int i = 0; i < n; ++i) {
      const Vec m1 = drift * mean;
      const Vec m2 = drift * (mean + 0.5 * h * m1);
      const Vec m3 = drift * (mean + 0.5 * h * m2);
      const Vec m4 = drift * (mean + h * m3);
      mean += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
      const Mat c1 = dcov(cov);
      const Mat c2 = dcov(cov + 0.5 * h * c1);
      const Mat c3 = dcov(cov + 0.5 * h * c2);
      const Mat c4 = dcov(cov + h * c3);
      cov += (h / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
    }
    return GaussianState<Dim>{mean, CovMatrix<Dim>(cov), state.kind};
  };
  if (t == 0.0) return state;
  int n = std::max(1, steps);
  GaussianState<Dim> previous = run(n);
  while (n < max_steps) {
    n *= 2;
    GaussianState<Dim> current = run(n);
    const double scale = std::max({1.0, current.cov.matrix().cwiseAbs().maxCoeff(),
                                   current.mean.cwiseAbs().maxCoeff()});
    const double change = std::max((current.cov.matrix() - previous.cov.matrix()).cwiseAbs().maxCoeff(),
                                   (current.mean - previous.mean).cwiseAbs().maxCoeff());
    if (change <= 1e-10 * scale) return current;
    previous = current;
  }
  return previous;
}

GaussianState1 moment_ode_oracle(const GaussianState1& state, const SystemParams& params,
                                 const DiffusionMatrix& d, double t, int steps);

namespace detail {

/// Integrals over [0, t] of e^{-2 gamma s} cos^2, cos sin / a and sin^2 / a^2 of
/// (a s), with a^2 = omega^2 - gamma^2 of either sign.
struct TrigIntegrals {
  double uu = 0.0;
  double uv = 0.0;
  double vv = 0.0;
};
TrigIntegrals trig_integrals(double t, double gamma, double a2);

}  // namespace detail

}  // namespace disent
