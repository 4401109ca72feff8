#include "disent/dynamics_coupled.hpp"
#include "support/random_states.hpp"

#include <doctest.h>

#include <cmath>

using namespace disent;

namespace {

constexpr FlowVariant kPrinted = FlowVariant::PaperPrinted;
constexpr FlowVariant kOde = FlowVariant::OdeConsistent;

template <class M>
double rel_diff(const M& a, const M& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

Matrix2 sector_quadrature(double t, double d1, double d2, double m, double gamma, double omega,
                          FlowVariant variant) {
  return mu_quadrature(t, DiffusionMatrix{d2, 0.0, d1},
                       [&](double s) { return characteristic_flow(s, m, gamma, omega, variant); })
      .matrix();
}

}  // namespace

TEST_CASE("rotated frame") {
  const Matrix4 r = rotation_matrix();
  CHECK(rel_diff(r, Matrix4(r.transpose())) == 0.0);
  CHECK(rel_diff(Matrix4(r * r), Matrix4(Matrix4::Identity())) < 1e-15);

  const GaussianState2 vac = vacuum_state_2mode();
  CHECK(rel_diff(rotate_cov(vac.cov).matrix(), vac.cov.matrix()) < 1e-15);

  testing::StateSampler sampler;
  for (int i = 0; i < 100; ++i) {
    const GaussianState2 s = sampler.state_2mode();
    CHECK(rel_diff(rotate_cov(rotate_cov(s.cov)).matrix(), s.cov.matrix()) < 1e-14);
    CHECK(is_wigner_cov(rotate_cov(s.cov)));
    CHECK(rel_diff(rotate_vector(rotate_vector(s.mean)), s.mean) < 1e-14);
  }

  // Two-mode squeezing becomes sector-diagonal with squeezed P1 and Q2.
  const double r_sq = 0.8;
  const Matrix4 epr = rotate_cov(two_mode_squeezed(r_sq).cov).matrix();
  CHECK(epr.block<2, 2>(0, 2).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(epr(1, 1) == doctest::Approx(0.5 * std::exp(-2.0 * r_sq)).epsilon(1e-14));
  CHECK(epr(2, 2) == doctest::Approx(0.5 * std::exp(-2.0 * r_sq)).epsilon(1e-14));
  CHECK(epr(0, 0) == doctest::Approx(0.5 * std::exp(2.0 * r_sq)).epsilon(1e-14));
  CHECK(epr(3, 3) == doctest::Approx(0.5 * std::exp(2.0 * r_sq)).epsilon(1e-14));
}

TEST_CASE("sector frequencies") {
  CoupledParams p = CoupledParams::with_minimal_diffusion(1.0, 0.1, 1.0, 0.0, 1.0);
  CHECK(sector_frequencies(p).plus == 1.0);
  CHECK(sector_frequencies(p).minus == 1.0);
  p.omega_c = 0.5;
  CHECK(sector_frequencies(p).minus == doctest::Approx(1.224745).epsilon(1e-6));
  CHECK(sector_frequency(p, Sector::Plus) == 1.0);
  p.Omega = 0.0;
  p.omega_c = 1.0;
  CHECK(sector_frequencies(p).plus == 0.0);
  CHECK(sector_frequencies(p).minus == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  testing::StateSampler sampler;
  for (int i = 0; i < 100; ++i) {
    p.Omega = sampler.uniform(0.0, 5.0);
    p.omega_c = sampler.uniform(0.0, 5.0);
    const SectorFrequencies f = sector_frequencies(p);
    CHECK(f.minus >= f.plus);
    CHECK(f.minus * f.minus - f.plus * f.plus == doctest::Approx(2.0 * p.omega_c * p.omega_c).epsilon(1e-12));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(CoupledParams::with_minimal_diffusion(0.0, 0.1, 1.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CoupledParams::with_minimal_diffusion(1.0, -0.1, 1.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CoupledParams::with_minimal_diffusion(1.0, 0.1, 1.0, 0.5, 0.0), std::invalid_argument);
  CoupledParams p;
  p.diffusion_override = DiffusionMatrix{0.0, 0.0, 1.0};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("sector noise integrals match quadrature") {
  CHECK(sector_mu_closed(0.0, 1.0, 0.1, 1.0, 0.2, 1.0).matrix().isZero());
  double worst = 0.0;
  for (auto variant : {kPrinted, kOde}) {
    for (double gamma : {0.0, 0.05, 0.5, 1.0, 2.0}) {
      for (double omega : {0.5, 1.0, 1.224745}) {
        for (double kT : {0.1, 10.0}) {
          const DiffusionMatrix d = gamma > 0.0 ? minimal_diffusion(1.0, gamma, kT) : DiffusionMatrix{0.0, 0.0, kT};
          for (double t : {0.01, 1.0, 9.0}) {
            const SectorMu mu = sector_mu_closed(t, d.d_pp, d.d_qq, 1.0, gamma, omega, variant);
            const Matrix2 quad = sector_quadrature(t, d.d_pp, d.d_qq, 1.0, gamma, omega, variant);
            worst = std::max(worst, rel_diff(mu.matrix(), quad));
          }
        }
      }
    }
  }
  CHECK(worst <= 1e-8);
  CHECK_THROWS_AS(sector_mu_closed(-1.0, 1.0, 0.1, 1.0, 0.2, 1.0), std::invalid_argument);
}

TEST_CASE("sector noise integrals are PSD and Loewner-monotone") {
  testing::StateSampler sampler;
  for (int i = 0; i < 200; ++i) {
    const double d1 = sampler.uniform(0.0, 3.0);
    const double d2 = sampler.uniform(0.0, 3.0);
    const double gamma = sampler.uniform(0.0, 2.0);
    const double omega = sampler.uniform(0.0, 3.0);
    const double t1 = sampler.uniform(0.0, 10.0);
    const double t2 = t1 + sampler.uniform(0.0, 10.0);
    for (auto variant : {kPrinted, kOde}) {
      const Matrix2 a = sector_mu_closed(t1, d1, d2, 1.0, gamma, omega, variant).matrix();
      const Matrix2 b = sector_mu_closed(t2, d1, d2, 1.0, gamma, omega, variant).matrix();
      CHECK(is_psd(a));
      CHECK(is_psd(Matrix2(b - a)));
    }
  }
}

TEST_CASE("asymptotic sector integrals") {
  const CoupledParams p = CoupledParams::with_minimal_diffusion(1.0, 0.03, 1.0, 0.0, 10.0);
  CHECK(sector_mu_asymptotic(p, Sector::Plus, true).B == doctest::Approx(-9.99375 * 0.03).epsilon(1e-14));
  CHECK(sector_mu_asymptotic(p, Sector::Plus, false).B ==
        doctest::Approx(sector_mu_asymptotic(p, Sector::Plus, true).B).epsilon(1e-12));

  for (double gamma : {0.05, 0.3}) {
    const CoupledParams q = CoupledParams::with_minimal_diffusion(1.3, gamma, 1.0, 0.5, 4.0);
    const DiffusionMatrix d = q.diffusion();
    for (Sector s : {Sector::Plus, Sector::Minus}) {
      const SectorMu limit = sector_mu_asymptotic(q, s, true);
      CHECK(rel_diff(sector_mu_asymptotic(q, s, false).matrix(), limit.matrix()) < 1e-12);
      const double w = sector_frequency(q, s);
      for (double gamma_t : {10.0, 20.0}) {
        const double t = gamma_t / gamma;
        const SectorMu mu = sector_mu_closed(t, d.d_pp, d.d_qq, q.m, gamma, w);
        const double scale = limit.matrix().cwiseAbs().maxCoeff();
        CHECK((mu.matrix() - limit.matrix()).cwiseAbs().maxCoeff() <= (10.0 * std::exp(-2.0 * gamma_t) + 1e-14) * scale);
      }
    }
  }

  testing::StateSampler sampler;
  for (int i = 0; i < 500; ++i) {
    const double omega = sampler.uniform(0.1, 5.0);
    const double gamma = sampler.uniform(1e-3, 0.99) * omega;
    const CoupledParams q = CoupledParams::with_minimal_diffusion(sampler.uniform(0.1, 10.0), gamma, omega,
                                                                  sampler.uniform(0.0, 2.0), sampler.uniform(0.01, 100.0));
    CHECK(sector_mu_asymptotic(q, Sector::Plus, true).A > 0.0);
    CHECK(sector_mu_asymptotic(q, Sector::Minus, true).A > 0.0);
  }
  CHECK_THROWS_AS(sector_mu_asymptotic(CoupledParams::with_minimal_diffusion(1.0, 0.0, 1.0, 0.0, 1.0), Sector::Plus, true),
                  std::invalid_argument);
}

TEST_CASE("undamped sector forms") {
  const DiffusionMatrix d{0.3, 0.0, 0.8};
  const double m = 1.2;
  for (double omega : {0.7, 1.9}) {
    for (double t : {0.0, 0.4, 3.0, 11.0}) {
      const SectorMu mu = sector_mu_gamma0(t, d, m, omega);
      CHECK(mu.B == 0.0);
      const Matrix2 quad = sector_quadrature(t, d.d_pp, d.d_qq, m, 0.0, omega, kPrinted);
      // The diagonal confirms the sin(2 Omega t) / (2 Omega) oscillation.
      CHECK(mu.A == doctest::Approx(quad(0, 0)).epsilon(1e-8));
      CHECK(mu.C == doctest::Approx(quad(1, 1)).epsilon(1e-8));
      // The off-diagonal entry of the integral is not zero in general.
      const double off = (m * omega * d.d_qq - d.d_pp / (m * omega)) * std::pow(std::sin(omega * t), 2) / (2.0 * omega);
      CHECK(quad(0, 1) == doctest::Approx(off).epsilon(1e-8));
    }
  }
  // Balanced diffusion removes the oscillation and the off-diagonal entry.
  const double omega = 1.5;
  const DiffusionMatrix balanced{0.4 / (m * m * omega * omega), 0.0, 0.4};
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(sector_mu_gamma0(t, balanced, m, omega).A == doctest::Approx(0.4 * t).epsilon(1e-14));
    CHECK(std::abs(sector_quadrature(t, balanced.d_pp, balanced.d_qq, m, 0.0, omega, kPrinted)(0, 1)) < 1e-10);
  }
  CHECK_THROWS_AS(sector_mu_gamma0(1.0, DiffusionMatrix{0.1, 0.1, 1.0}, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sector_mu_gamma0(-1.0, d, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("coupled propagator structure") {
  const CoupledParams p = CoupledParams::with_minimal_diffusion(1.0, 0.1, 1.0, 0.5, 2.0);
  const CoupledPropagator zero = coupled_propagator(0.0, p, kPrinted);
  CHECK(rel_diff(zero.flow, Matrix4(Matrix4::Identity())) == 0.0);
  CHECK(zero.noise.matrix().isZero());

  const CoupledPropagator prop = coupled_propagator(2.5, p, kPrinted);
  CHECK(prop.flow.block<2, 2>(0, 2).isZero());
  CHECK(prop.flow.block<2, 2>(2, 0).isZero());
  CHECK(rel_diff(Matrix2(prop.flow.block<2, 2>(0, 0)), prop.plus.flow) == 0.0);
  CHECK(rel_diff(Matrix2(prop.noise.matrix().block<2, 2>(2, 2)), prop.minus.noise.matrix()) == 0.0);
  CHECK(prop.det_flow == doctest::Approx(prop.plus.det_flow * prop.minus.det_flow).epsilon(1e-14));
  CHECK(rel_diff(prop.noise_original().matrix(), rotate_cov(prop.noise).matrix()) == 0.0);

  CoupledParams uncoupled = p;
  uncoupled.omega_c = 0.0;
  const CoupledPropagator same = coupled_propagator(2.5, uncoupled, kPrinted);
  CHECK(rel_diff(same.plus.flow, same.minus.flow) == 0.0);
  CHECK(rel_diff(same.plus.noise.matrix(), same.minus.noise.matrix()) == 0.0);
  CHECK_THROWS_AS(coupled_propagator(-1.0, p, kPrinted), std::invalid_argument);
}

TEST_CASE("two-mode evolution") {
  const CoupledParams p = CoupledParams::with_minimal_diffusion(1.0, 0.2, 1.0, 0.5, 3.0);
  const GaussianState2 vac = vacuum_state_2mode();
  const GaussianState2 still = evolve_covariance_4x4(vac, 0.0, p, kPrinted);
  CHECK(rel_diff(still.cov.matrix(), vac.cov.matrix()) < 1e-15);

  testing::StateSampler sampler;
  for (int i = 0; i < 20; ++i) {
    GaussianState2 s = sampler.state_2mode();
    // Sector-block-diagonal input stays block diagonal in the rotated frame.
    Matrix4 c = s.cov.matrix();
    c.block<2, 2>(0, 2).setZero();
    c.block<2, 2>(2, 0).setZero();
    GaussianState2 blocky = s;
    blocky.cov = Cov4(c);
    const GaussianState2 out = evolve_covariance_4x4(blocky, 1.7, p, kPrinted, Frame::Rotated);
    CHECK(out.cov.matrix().block<2, 2>(0, 2).cwiseAbs().maxCoeff() < 1e-12);

    // Each sector block evolves like the single-mode propagation.
    const CoupledPropagator prop = coupled_propagator(1.7, p, kPrinted);
    GaussianState1 plus;
    plus.cov = Cov2(Matrix2(c.block<2, 2>(0, 0)));
    plus.mean = blocky.mean.head<2>();
    CHECK(rel_diff(propagate_gaussian(plus, prop.plus).cov.matrix(), Matrix2(out.cov.matrix().block<2, 2>(0, 0))) < 1e-12);

    // Against the 4x4 moment equations in the original frame.
    const double t = sampler.uniform(0.1, 6.0);
    const GaussianState2 closed = evolve_covariance_4x4(s, t, p, kOde, Frame::Original);
    const GaussianState2 oracle = coupled_moment_oracle(s, p, t, 64);
    CHECK(rel_diff(closed.cov.matrix(), oracle.cov.matrix()) <= 1e-8);
    CHECK(rel_diff(closed.mean, oracle.mean) <= 1e-8);

    // Frames are consistent.
    GaussianState2 rotated_in = s;
    rotated_in.cov = rotate_cov(s.cov);
    rotated_in.mean = rotate_vector(s.mean);
    const GaussianState2 rotated_out = evolve_covariance_4x4(rotated_in, t, p, kOde, Frame::Rotated);
    CHECK(rel_diff(rotate_cov(rotated_out.cov).matrix(), closed.cov.matrix()) < 1e-12);
  }
}

TEST_CASE("without coupling each particle evolves on its own") {
  CoupledParams p = CoupledParams::with_minimal_diffusion(1.4, 0.15, 0.9, 0.0, 2.0);
  const SystemParams single{p.m, p.gamma, p.Omega, p.kT};
  testing::StateSampler sampler;
  for (auto variant : {kPrinted, kOde}) {
    for (int i = 0; i < 20; ++i) {
      const GaussianState1 a = sampler.state_1mode();
      const GaussianState1 b = sampler.state_1mode();
      GaussianState2 product;
      Matrix4 c = Matrix4::Zero();
      c.block<2, 2>(0, 0) = a.cov.matrix();
      c.block<2, 2>(2, 2) = b.cov.matrix();
      product.cov = Cov4(c);
      product.mean << a.mean, b.mean;
      const double t = sampler.uniform(0.0, 8.0);
      const GaussianState2 out = evolve_covariance_4x4(product, t, p, variant);
      const Propagator prop = make_propagator(t, single, p.diffusion(), variant);
      const GaussianState1 a_t = propagate_gaussian(a, prop);
      const GaussianState1 b_t = propagate_gaussian(b, prop);
      CHECK(rel_diff(Matrix2(out.cov.matrix().block<2, 2>(0, 0)), a_t.cov.matrix()) < 1e-12);
      CHECK(rel_diff(Matrix2(out.cov.matrix().block<2, 2>(2, 2)), b_t.cov.matrix()) < 1e-12);
      CHECK(out.cov.matrix().block<2, 2>(0, 2).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(rel_diff(Vector2(out.mean.head<2>()), a_t.mean) < 1e-12);
    }
  }
}
