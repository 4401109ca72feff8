#pragma once

// Separability tests for two-mode Gaussians and the finite-time certificate
// for the coupled pair: smear the initial state with a C0 Gaussian, then ask
// whether the remaining propagator kernel is a separable Wigner function.

#include "disent/dynamics_coupled.hpp"

#include <optional>

namespace disent {

struct DuanSums {
  double first = 0.0;   // S11 + S44
  double second = 0.0;  // S22 + S33
};

/// Sums on a covariance ordered (Q1, P1, Q2, P2).
DuanSums duan_sums(const Cov4& sigma_rotated);
bool duan_separable(const Cov4& sigma_rotated);

enum class Bipartition {
  /// (q1, p1) | (q2, p2) of the given covariance.
  Particles,
  /// The given covariance is in the original frame; test (Q1, P1) | (Q2, P2).
  Sectors,
};

struct PptResult {
  bool separable = false;
  double min_symplectic_eigenvalue = 0.0;
};

/// Exact two-mode Gaussian PPT test. Throws std::invalid_argument for a
/// Wigner-invalid covariance.
PptResult simon_ppt_separable(const Cov4& sigma, Bipartition split = Bipartition::Particles);

/// eta C0 eta^T for one sector.
class SmearingChoice {
 public:
  /// Validates det = 1/4 (to 1e-12 relative) and PSD.
  static SmearingChoice custom(const Matrix2& eta_c0_eta);
  /// [[m sqrt(gamma kT), 1/2], [1/2, 1/(2 m sqrt(gamma kT))]].
  static SmearingChoice standard(double m, double gamma, double kT);
  /// diag(1/2, 1/2), used when gamma = 0.
  static SmearingChoice isotropic();

  const Matrix2& eta_c0_eta() const { return matrix_; }
  /// C0 itself, eta^T (eta C0 eta^T) eta.
  Matrix2 c0() const { return eta_conjugate(matrix_); }
  double det() const { return matrix_.determinant(); }

 private:
  explicit SmearingChoice(const Matrix2& m) : matrix_(m) {}
  Matrix2 matrix_;
};

/// The standard choice; throws std::invalid_argument when gamma or kT is 0.
SmearingChoice choose_c0(const CoupledParams& p);

struct WignerCondition {
  /// e^{4 gamma t} det(2 mu_t - eta C0 eta^T) - 1/4
  double value = 0.0;
  bool holds = false;
};

WignerCondition wigner_condition_sector(double t, const SectorMu& mu, const SmearingChoice& c0,
                                        double gamma);

/// Long-time value of det(2 mu - eta C0 eta^T) for minimal diffusion in the
/// given sector, as a closed expression in the dimensionless ratios.
double crit_asymptotic(const CoupledParams& p, Sector sector);

/// The same quantity from the determinant of the asymptotic matrices.
double crit_asymptotic_direct(const CoupledParams& p, Sector sector);

/// (kT gamma / Omega^2)^2 ((Omega^4 + 3 g^2 Omega^2 - 4 g^4) / (g^2 (Omega^2 - g^2)) - 4).
double high_temp_dominant_term(const CoupledParams& p, Sector sector);

/// Diagonal of the sector kernel E_{-t}^T N E_{-t}, N = 2 mu_t - eta C0 eta^T.
/// `first` is the entry picked by m1 = diag(1, 0), `second` by m2 = diag(0, 1).
struct SectorExpectations {
  double first = 0.0;
  double second = 0.0;
};

struct SectorFlowContext {
  double m = 1.0;
  double gamma = 0.0;
  double omega = 0.0;
  FlowVariant variant = FlowVariant::PaperPrinted;
};

/// tr(m_k E_{-t}^T N E_{-t}). Without c0 the smearing term is dropped.
SectorExpectations duan_expectations(double t, const SectorMu& mu,
                                     const std::optional<SmearingChoice>& c0,
                                     const SectorFlowContext& flow);

/// v_k^T N v_k with v_k the k-th column of E_{-t}.
SectorExpectations duan_expectations_quadratic(double t, const SectorMu& mu,
                                               const std::optional<SmearingChoice>& c0,
                                               const SectorFlowContext& flow);

/// e^{2 gamma t} u^T L_k^T N L_k u with u = (cos a t, sin a t); underdamped only.
SectorExpectations duan_expectations_u_form(double t, const SectorMu& mu,
                                            const std::optional<SmearingChoice>& c0,
                                            const SectorFlowContext& flow);

struct SeparabilityReport {
  double t = 0.0;
  double wigner_plus = 0.0;
  double wigner_minus = 0.0;
  bool wigner_holds_plus = false;
  bool wigner_holds_minus = false;
  double duan_sum_1 = 0.0;
  double duan_sum_2 = 0.0;
  /// The sector kernel assembled into a 4x4 state passes the exact PPT test.
  bool kernel_ppt = false;
  /// M_t - eps_t C eps_t^T with C = C0 per sector, the kernel left after
  /// smearing under forward transport, is a separable Wigner function.
  bool transport_kernel_separable = false;
  bool certified = false;
};

SeparabilityReport certify_at_time(double t, const CoupledParams& p, FlowVariant variant);

/// Uniform samples on (0, t_max]: at least 1000, and at least 40 per period
/// 2 pi / a for every underdamped sector with a = sqrt(Omega^2 - gamma^2).
int onset_sample_count(const CoupledParams& p, double t_max);

/// Start of the final certified stretch of a uniform scan up to t_max, refined
/// by bisection against the last uncertified sample.
std::optional<double> certification_onset(const CoupledParams& p, double t_max,
                                          FlowVariant variant);

struct EprSample {
  double t = 0.0;
  double min_symplectic_eigenvalue = 0.0;
  bool entangled = false;
  DuanSums duan;
};

/// Evolves `initial` (original frame) to t and runs the PPT and Duan tests.
EprSample epr_sample(const GaussianState2& initial, double t, const CoupledParams& p,
                     FlowVariant variant);

/// First time the evolved state becomes PPT-separable: uniform scan of
/// `samples` points on (0, t_max], then bisection.
std::optional<double> separation_time(const GaussianState2& initial, const CoupledParams& p,
                                      FlowVariant variant, double t_max, int samples = 1000);

}  // namespace disent
