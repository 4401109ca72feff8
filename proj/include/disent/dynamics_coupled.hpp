#pragma once

// Two harmonically coupled oscillators sharing one environment. In the
// rotated frame (Q1, P1, Q2, P2) = R (q1, p1, q2, p2) the dynamics splits into
// a "plus" sector at frequency Omega and a "minus" sector at Omega'.

#include "disent/dynamics_single.hpp"

#include <optional>

namespace disent {

struct CoupledParams {
  double m = 1.0;
  double gamma = 0.0;
  double Omega = 0.0;
  double omega_c = 0.0;
  double kT = 0.0;
  /// Per-particle diffusion; minimal_diffusion(m, gamma, kT) when unset.
  std::optional<DiffusionMatrix> diffusion_override;

  double omega_prime() const { return std::sqrt(2.0 * omega_c * omega_c + Omega * Omega); }
  DiffusionMatrix diffusion() const;
  void validate() const;

  static CoupledParams with_minimal_diffusion(double m, double gamma, double Omega,
                                              double omega_c, double kT);
};

enum class Sector { Plus, Minus };

enum class Frame { Original, Rotated };

struct SectorMu {
  Sector sector = Sector::Plus;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double t = 0.0;

  Matrix2 matrix() const {
    Matrix2 out;
    out << A, B, B, C;
    return out;
  }
};

/// (1/sqrt 2) [[I, I], [I, -I]] in (q1, p1, q2, p2) ordering.
Matrix4 rotation_matrix();

Cov4 rotate_cov(const Cov4& sigma);
Vector4 rotate_vector(const Vector4& z);

struct SectorFrequencies {
  double plus = 0.0;
  double minus = 0.0;
};

SectorFrequencies sector_frequencies(const CoupledParams& p);

double sector_frequency(const CoupledParams& p, Sector sector);

/// Noise integral of one sector with diagonal diffusion d1 = d_pp, d2 = d_qq.
SectorMu sector_mu_closed(double t, double d1, double d2, double m, double gamma,
                          double omega_sector, FlowVariant variant = FlowVariant::PaperPrinted);

/// Long-time limit of the PaperPrinted sector integral. With `minimal` the
/// minimal-diffusion expressions in kT are used, otherwise p.diffusion()
/// (which must have d_qp = 0).
SectorMu sector_mu_asymptotic(const CoupledParams& p, Sector sector, bool minimal);

/// gamma = 0 forms with B = 0 and sin(2 Omega t) / (2 Omega) oscillations.
SectorMu sector_mu_gamma0(double t, const DiffusionMatrix& d, double m, double omega_sector);

struct CoupledPropagator {
  double t = 0.0;
  FlowVariant variant = FlowVariant::PaperPrinted;
  /// Block-diagonal over (plus, minus), rotated frame.
  Matrix4 flow = Matrix4::Identity();
  Matrix4 epsilon = Matrix4::Identity();
  Cov4 mu;
  Cov4 noise;
  double det_flow = 1.0;
  Propagator plus;
  Propagator minus;

  Cov4 noise_original() const { return rotate_cov(noise); }
};

CoupledPropagator coupled_propagator(double t, const CoupledParams& p, FlowVariant variant);

/// Evolves a two-mode Gaussian; `frame` applies to both input and output.
GaussianState2 evolve_covariance_4x4(const GaussianState2& state, double t,
                                     const CoupledParams& p, FlowVariant variant,
                                     Frame frame = Frame::Original);

/// 4x4 phase-space drift in the original frame.
Matrix4 coupled_drift(const CoupledParams& p);

/// RK4 moment integration of the coupled system in the original frame.
GaussianState2 coupled_moment_oracle(const GaussianState2& state, const CoupledParams& p,
                                     double t, int steps);

}  // namespace disent
