#include "disent/phase_space.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>

namespace disent {

SymplecticForm::SymplecticForm(int n_modes) : n_modes_(n_modes) {
  if (n_modes != 1 && n_modes != 2) {
    throw std::invalid_argument("symplectic_form: unsupported mode count " +
                                std::to_string(n_modes));
  }
  matrix_ = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    matrix_.block<2, 2>(2 * k, 2 * k) = eta();
  }
}

SymplecticForm symplectic_form(int n_modes) { return SymplecticForm(n_modes); }

GaussianState1 vacuum_state() { return {Vector2::Zero(), Cov2::identity(0.5), StateKind::Physical}; }

GaussianState2 vacuum_state_2mode() {
  return {Vector4::Zero(), Cov4::identity(0.5), StateKind::Physical};
}

GaussianState2 two_mode_squeezed(double r) {
  if (r < 0.0) throw std::invalid_argument("two_mode_squeezed: r must be >= 0");
  const double c = 0.5 * std::cosh(2.0 * r);
  const double s = 0.5 * std::sinh(2.0 * r);
  Matrix4 m = Matrix4::Zero();
  m.diagonal().setConstant(c);
  m(0, 2) = m(2, 0) = s;
  m(1, 3) = m(3, 1) = -s;
  return {Vector4::Zero(), Cov4(m), StateKind::Physical};
}

bool is_psd(const Matrix2& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double tol = kPsdTolerance * scale;
  // 2x2: both diagonal entries and the determinant nonnegative.
  return m(0, 0) >= -tol && m(1, 1) >= -tol && m.determinant() >= -tol * scale;
}

bool is_psd(const Matrix4& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Matrix4> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -kPsdTolerance * scale;
}

bool is_wigner_cov(const Cov2& sigma) {
  const Matrix2& m = sigma.matrix();
  if (!is_psd(m)) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return m.determinant() >= 0.25 - kPsdTolerance * scale * scale;
}

bool is_wigner_cov(const Cov4& sigma) {
  using Complex4 = Eigen::Matrix<std::complex<double>, 4, 4>;
  const Matrix4 j = symplectic_form(2).matrix();
  const Complex4 h = sigma.matrix().cast<std::complex<double>>() +
                     std::complex<double>(0.0, 0.5) * j.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Complex4> es(h, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, sigma.matrix().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() >= -kPsdTolerance * scale;
}

namespace {

template <int Dim>
double overlap(const GaussianState<Dim>& a, const GaussianState<Dim>& b) {
  const SquareMatrix<Dim> s = a.cov.matrix() + b.cov.matrix();
  const Eigen::FullPivLU<SquareMatrix<Dim>> lu(s);
  const double det = s.determinant();
  if (!lu.isInvertible() || det <= 0.0) {
    throw std::domain_error("gaussian_overlap: covariance sum is singular");
  }
  const ColVector<Dim> d = a.mean - b.mean;
  const double quad = d.dot(lu.solve(d));
  // (2 pi)^n * g_{a+b}(d) for n modes.
  return std::exp(-0.5 * quad) / std::sqrt(det);
}

}  // namespace

double gaussian_overlap(const GaussianState1& a, const GaussianState1& b) { return overlap(a, b); }
double gaussian_overlap(const GaussianState2& a, const GaussianState2& b) { return overlap(a, b); }

Cov2 p_offset_c14(double m, double d_pp) {
  if (!(m > 0.0) || !(d_pp > 0.0)) {
    throw std::invalid_argument("p_offset_c14: mass and momentum diffusion must be positive");
  }
  Matrix2 c;
  c << 1.0 / std::sqrt(2.0 * d_pp * m), 0.5, 0.5, std::sqrt(d_pp * m / 2.0);
  return Cov2(c);
}

}  // namespace disent
