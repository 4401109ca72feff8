#pragma once

// Symplectic linear algebra and Gaussian states on 1- or 2-mode phase space.
// Units: hbar = 1, coordinates ordered (q, p) per mode.

#include <Eigen/Dense>

#include <stdexcept>

namespace disent {

using Matrix2 = Eigen::Matrix2d;
using Matrix4 = Eigen::Matrix4d;
using Vector2 = Eigen::Vector2d;
using Vector4 = Eigen::Vector4d;

template <int Dim>
using SquareMatrix = Eigen::Matrix<double, Dim, Dim>;
template <int Dim>
using ColVector = Eigen::Matrix<double, Dim, 1>;

/// Relative lower bound below which eigenvalues and minors count as zero.
inline constexpr double kPsdTolerance = 1e-12;

/// Block-diagonal eta (+) ... (+) eta with eta = [[0, 1], [-1, 0]].
class SymplecticForm {
 public:
  explicit SymplecticForm(int n_modes);

  int n_modes() const { return n_modes_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  int n_modes_;
  Eigen::MatrixXd matrix_;
};

SymplecticForm symplectic_form(int n_modes);

/// The single-mode eta.
inline Matrix2 eta() {
  Matrix2 e;
  e << 0.0, 1.0, -1.0, 0.0;
  return e;
}

/// eta^T X eta, i.e. [[X22, -X21], [-X12, X11]].
inline Matrix2 eta_conjugate(const Matrix2& x) { return eta().transpose() * x * eta(); }

/// Symmetric covariance matrix. Only the symmetric part of the input is kept,
/// so symmetry holds structurally.
template <int Dim>
class CovMatrix {
  static_assert(Dim == 2 || Dim == 4, "covariances are 2x2 or 4x4");

 public:
  using Matrix = SquareMatrix<Dim>;

  CovMatrix() : m_(Matrix::Zero()) {}
  explicit CovMatrix(const Matrix& m) : m_(0.5 * (m + m.transpose())) {}

  static CovMatrix zero() { return CovMatrix(); }
  static CovMatrix identity(double scale = 1.0) { return CovMatrix(Matrix::Identity() * scale); }

  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  static constexpr int dim() { return Dim; }

  CovMatrix operator+(const CovMatrix& o) const { return CovMatrix(m_ + o.m_); }
  CovMatrix operator-(const CovMatrix& o) const { return CovMatrix(m_ - o.m_); }
  CovMatrix operator-() const { return CovMatrix(-m_); }
  bool operator==(const CovMatrix& o) const { return m_ == o.m_; }

 private:
  Matrix m_;
};

using Cov2 = CovMatrix<2>;
using Cov4 = CovMatrix<4>;

/// Physical states must be Wigner-valid; kernels (noise Gaussians,
/// smearing Gaussians) need not be.
enum class StateKind { Physical, Kernel };

template <int Dim>
struct GaussianState {
  ColVector<Dim> mean = ColVector<Dim>::Zero();
  CovMatrix<Dim> cov;
  StateKind kind = StateKind::Physical;
};

using GaussianState1 = GaussianState<2>;
using GaussianState2 = GaussianState<4>;

GaussianState1 vacuum_state();
GaussianState2 vacuum_state_2mode();

/// Two-mode squeezed vacuum in (q1, p1, q2, p2) ordering. Anti-correlated
/// momenta and correlated positions, so Q2 and P1 of the rotated frame squeeze.
GaussianState2 two_mode_squeezed(double r);

/// Convolution of normalised Gaussians adds covariances.
template <int Dim>
CovMatrix<Dim> convolve_gaussians(const CovMatrix<Dim>& a, const CovMatrix<Dim>& b) {
  return a + b;
}

bool is_psd(const Matrix2& m);
bool is_psd(const Matrix4& m);

/// PSD and det >= 1/4, i.e. sigma + (i/2) eta >= 0.
bool is_wigner_cov(const Cov2& sigma);
/// sigma + (i/2) J >= 0 for the two-mode symplectic form J.
bool is_wigner_cov(const Cov4& sigma);

/// tr(rho sigma) for Gaussian states, in the normalisation where two
/// identical pure states overlap to 1.
double gaussian_overlap(const GaussianState1& a, const GaussianState1& b);
double gaussian_overlap(const GaussianState2& a, const GaussianState2& b);

/// Minimum-uncertainty covariance linking Wigner and P functions,
/// [[1/sqrt(2 D m), 1/2], [1/2, sqrt(D m / 2)]].
Cov2 p_offset_c14(double m, double d_pp);

}  // namespace disent
