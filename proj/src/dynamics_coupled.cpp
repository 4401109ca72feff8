#include "disent/dynamics_coupled.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace disent {

DiffusionMatrix CoupledParams::diffusion() const {
  if (diffusion_override) return *diffusion_override;
  return minimal_diffusion(m, gamma, kT);
}

void CoupledParams::validate() const {
  if (!(m > 0.0)) throw std::invalid_argument("mass must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(Omega >= 0.0)) throw std::invalid_argument("Omega must be >= 0");
  if (!(omega_c >= 0.0)) throw std::invalid_argument("omega_c must be >= 0");
  if (!(kT >= 0.0)) throw std::invalid_argument("kT must be >= 0");
  if (!diffusion_override && !(kT > 0.0)) {
    throw std::invalid_argument("kT must be positive for minimal diffusion");
  }
}

CoupledParams CoupledParams::with_minimal_diffusion(double m, double gamma, double Omega,
                                                    double omega_c, double kT) {
  CoupledParams p{m, gamma, Omega, omega_c, kT, std::nullopt};
  p.validate();
  return p;
}

Matrix4 rotation_matrix() {
  Matrix4 r;
  r << 1, 0, 1, 0,
       0, 1, 0, 1,
       1, 0, -1, 0,
       0, 1, 0, -1;
  return r / std::numbers::sqrt2;
}

Cov4 rotate_cov(const Cov4& sigma) {
  const Matrix4 r = rotation_matrix();
  return Cov4(r * sigma.matrix() * r.transpose());
}

Vector4 rotate_vector(const Vector4& z) { return rotation_matrix() * z; }

SectorFrequencies sector_frequencies(const CoupledParams& p) { return {p.Omega, p.omega_prime()}; }

double sector_frequency(const CoupledParams& p, Sector sector) {
  return sector == Sector::Plus ? p.Omega : p.omega_prime();
}

SectorMu sector_mu_closed(double t, double d1, double d2, double m, double gamma,
                          double omega_sector, FlowVariant variant) {
  const Cov2 mu = mu_closed(t, DiffusionMatrix{d2, 0.0, d1}, m, gamma, omega_sector, variant);
  return {Sector::Plus, mu(0, 0), mu(0, 1), mu(1, 1), t};
}

SectorMu sector_mu_asymptotic(const CoupledParams& p, Sector sector, bool minimal) {
  if (!(p.gamma > 0.0)) throw std::invalid_argument("sector_mu_asymptotic: needs gamma > 0");
  const double w = sector_frequency(p, sector);
  if (!(w > 0.0)) throw std::invalid_argument("sector_mu_asymptotic: needs a positive frequency");
  const double g = p.gamma;
  const double m = p.m;
  const double w2 = w * w;
  // (Omega^4 + 3 g^2 Omega^2 - 4 g^4) / (Omega^2 (Omega^2 - g^2)); the common
  // factor Omega^2 - g^2 is cancelled so critical damping stays finite.
  const double ratio = (w2 + 4.0 * g * g) / w2;
  SectorMu out;
  out.sector = sector;
  out.t = std::numeric_limits<double>::infinity();
  if (minimal) {
    const double kT = p.kT;
    if (!(kT > 0.0)) throw std::invalid_argument("sector_mu_asymptotic: needs kT > 0");
    out.A = m * kT * ratio / 2.0 + m * w2 / (32.0 * kT);
    out.B = g / (16.0 * kT) - kT * g / w2;
    out.C = kT / (2.0 * m * w2) + ratio / (32.0 * m * kT);
    return out;
  }
  const DiffusionMatrix d = p.diffusion();
  if (d.d_qp != 0.0) throw std::invalid_argument("sector_mu_asymptotic: needs d_qp = 0");
  const double d1 = d.d_pp;
  const double d2 = d.d_qq;
  out.A = d1 * ratio / (4.0 * g) + d2 * m * m * w2 / (4.0 * g);
  out.B = (m * m * w2 * d2 - d1) / (2.0 * m * w2);
  out.C = d1 / (4.0 * m * m * g * w2) + d2 * ratio / (4.0 * g);
  return out;
}

SectorMu sector_mu_gamma0(double t, const DiffusionMatrix& d, double m, double omega_sector) {
  if (!(t >= 0.0)) throw std::invalid_argument("sector_mu_gamma0: t must be >= 0");
  if (d.d_qp != 0.0) throw std::invalid_argument("sector_mu_gamma0: needs d_qp = 0");
  const double w2 = omega_sector * omega_sector;
  // sin(2 Omega t) / (2 Omega)
  const double wobble = numerics::sinc_cont(4.0 * w2, t);
  const double pp = d.d_pp / 2.0;
  const double qq = d.d_qq * m * m * w2 / 2.0;
  SectorMu out;
  out.t = t;
  out.A = (pp + qq) * t + (pp - qq) * wobble;
  out.B = 0.0;
  if (w2 > 0.0) {
    const double pp_c = d.d_pp / (2.0 * m * m * w2);
    const double qq_c = d.d_qq / 2.0;
    out.C = (pp_c + qq_c) * t + (qq_c - pp_c) * wobble;
  } else {
    // Free limit: d_pp t^3 / (3 m^2) + d_qq t.
    out.C = d.d_pp * t * t * t / (3.0 * m * m) + d.d_qq * t;
  }
  return out;
}

CoupledPropagator coupled_propagator(double t, const CoupledParams& p, FlowVariant variant) {
  p.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("coupled_propagator: t must be >= 0");
  const DiffusionMatrix d = p.diffusion();
  CoupledPropagator out;
  out.t = t;
  out.variant = variant;
  const auto sector = [&](double w) {
    SystemParams sp{p.m, p.gamma, w, p.kT};
    return make_propagator(t, sp, d, variant);
  };
  out.plus = sector(p.Omega);
  out.minus = sector(p.omega_prime());
  Matrix4 flow = Matrix4::Zero();
  Matrix4 epsilon = Matrix4::Zero();
  Matrix4 mu = Matrix4::Zero();
  Matrix4 noise = Matrix4::Zero();
  flow.block<2, 2>(0, 0) = out.plus.flow;
  flow.block<2, 2>(2, 2) = out.minus.flow;
  epsilon.block<2, 2>(0, 0) = out.plus.epsilon;
  epsilon.block<2, 2>(2, 2) = out.minus.epsilon;
  mu.block<2, 2>(0, 0) = out.plus.mu.matrix();
  mu.block<2, 2>(2, 2) = out.minus.mu.matrix();
  noise.block<2, 2>(0, 0) = out.plus.noise.matrix();
  noise.block<2, 2>(2, 2) = out.minus.noise.matrix();
  out.flow = flow;
  out.epsilon = epsilon;
  out.mu = Cov4(mu);
  out.noise = Cov4(noise);
  out.det_flow = out.plus.det_flow * out.minus.det_flow;
  return out;
}

GaussianState2 evolve_covariance_4x4(const GaussianState2& state, double t,
                                     const CoupledParams& p, FlowVariant variant, Frame frame) {
  const CoupledPropagator prop = coupled_propagator(t, p, variant);
  if (prop.epsilon.determinant() == 0.0) {
    throw std::domain_error("evolve_covariance_4x4: singular flow");
  }
  const bool original = frame == Frame::Original;
  const Vector4 mean = original ? rotate_vector(state.mean) : state.mean;
  const Cov4 cov = original ? rotate_cov(state.cov) : state.cov;
  GaussianState2 out;
  out.kind = state.kind;
  out.mean = prop.epsilon * mean;
  out.cov = Cov4(prop.epsilon * cov.matrix() * prop.epsilon.transpose()) + prop.noise;
  if (original) {
    out.mean = rotate_vector(out.mean);
    out.cov = rotate_cov(out.cov);
  }
  return out;
}

Matrix4 coupled_drift(const CoupledParams& p) {
  const double k_self = p.m * (p.Omega * p.Omega + p.omega_c * p.omega_c);
  const double k_cross = p.m * p.omega_c * p.omega_c;
  Matrix4 f = Matrix4::Zero();
  f(0, 1) = 1.0 / p.m;
  f(1, 0) = -k_self;
  f(1, 2) = k_cross;
  f(1, 1) = -2.0 * p.gamma;
  f(2, 3) = 1.0 / p.m;
  f(3, 2) = -k_self;
  f(3, 0) = k_cross;
  f(3, 3) = -2.0 * p.gamma;
  return f;
}

GaussianState2 coupled_moment_oracle(const GaussianState2& state, const CoupledParams& p,
                                     double t, int steps) {
  p.validate();
  const Matrix2 d = p.diffusion().phase();
  Matrix4 d_phase = Matrix4::Zero();
  d_phase.block<2, 2>(0, 0) = d;
  d_phase.block<2, 2>(2, 2) = d;
  return integrate_moments<4>(state, coupled_drift(p), d_phase, t, steps);
}

}  // namespace disent
