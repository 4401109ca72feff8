#include "disent/separability.hpp"

#include "disent/disentangle_single.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace disent {

DuanSums duan_sums(const Cov4& s) { return {s(0, 0) + s(3, 3), s(1, 1) + s(2, 2)}; }

bool duan_separable(const Cov4& sigma_rotated) {
  const DuanSums sums = duan_sums(sigma_rotated);
  return sums.first >= 1.0 && sums.second >= 1.0;
}

PptResult simon_ppt_separable(const Cov4& sigma, Bipartition split) {
  if (!is_wigner_cov(sigma)) {
    throw std::invalid_argument("simon_ppt_separable: covariance is not Wigner-valid");
  }
  const Matrix4 s = split == Bipartition::Sectors ? rotate_cov(sigma).matrix() : sigma.matrix();
  const double det_a = s.block<2, 2>(0, 0).determinant();
  const double det_b = s.block<2, 2>(2, 2).determinant();
  const double det_c = s.block<2, 2>(0, 2).determinant();
  const double det_s = s.determinant();
  // Partial transposition flips the sign of det C.
  const double delta = det_a + det_b - 2.0 * det_c;
  const double disc = std::max(0.0, delta * delta - 4.0 * det_s);
  // The smaller root of x^2 - delta x + det, in the form without cancellation.
  const double larger = 0.5 * (delta + std::sqrt(disc));
  const double nu2 = larger > 0.0 ? std::max(0.0, det_s / larger) : 0.0;
  PptResult out;
  out.min_symplectic_eigenvalue = std::sqrt(nu2);
  out.separable = out.min_symplectic_eigenvalue >= 0.5 - 1e-12;
  return out;
}

SmearingChoice SmearingChoice::custom(const Matrix2& eta_c0_eta) {
  const Matrix2 sym = 0.5 * (eta_c0_eta + eta_c0_eta.transpose());
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if (std::abs(sym.determinant() - 0.25) > 1e-12 * scale * scale) {
    throw std::invalid_argument("SmearingChoice: determinant must be 1/4");
  }
  if (!is_psd(sym)) throw std::invalid_argument("SmearingChoice: matrix must be PSD");
  return SmearingChoice(sym);
}

SmearingChoice SmearingChoice::standard(double m, double gamma, double kT) {
  if (!(m > 0.0) || !(gamma > 0.0) || !(kT > 0.0)) {
    throw std::invalid_argument("choose_c0: needs m, gamma, kT > 0 for the standard choice");
  }
  const double w = m * std::sqrt(gamma * kT);
  Matrix2 c;
  c << w, 0.5, 0.5, 1.0 / (2.0 * w);
  return SmearingChoice(c);
}

SmearingChoice SmearingChoice::isotropic() { return SmearingChoice(Matrix2::Identity() * 0.5); }

SmearingChoice choose_c0(const CoupledParams& p) {
  return SmearingChoice::standard(p.m, p.gamma, p.kT);
}

WignerCondition wigner_condition_sector(double t, const SectorMu& mu, const SmearingChoice& c0,
                                        double gamma) {
  const Matrix2 n = 2.0 * mu.matrix() - c0.eta_c0_eta();
  WignerCondition out;
  out.value = std::exp(4.0 * gamma * t) * n.determinant() - 0.25;
  out.holds = out.value >= 0.0 && is_psd(n);
  return out;
}

namespace {

struct SectorRatios {
  double w2;
  double g;
  double kT;
  double x;  // Omega^4 + 3 g^2 Omega^2 - 4 g^4
  double under;  // Omega^2 - g^2
};

SectorRatios underdamped_ratios(const CoupledParams& p, Sector sector, const char* where) {
  if (!(p.gamma > 0.0) || !(p.kT > 0.0)) {
    throw std::invalid_argument(std::string(where) + ": needs gamma, kT > 0");
  }
  const double w = sector_frequency(p, sector);
  if (!(w > p.gamma)) {
    throw std::domain_error(std::string(where) + ": sector is not underdamped");
  }
  const double w2 = w * w;
  const double g = p.gamma;
  return {w2, g, p.kT, w2 * w2 + 3.0 * g * g * w2 - 4.0 * g * g * g * g, w2 - g * g};
}

}  // namespace

double crit_asymptotic(const CoupledParams& p, Sector sector) {
  const auto [w2, g, kT, x, under] = underdamped_ratios(p, sector, "crit_asymptotic");
  const double lead = x / (under * w2);
  const double root = std::sqrt(g * kT * kT * kT);  // sqrt(gamma (kT)^3)
  return lead * (kT * kT / w2 - 0.5 * std::sqrt(kT / g) + w2 / std::pow(16.0 * kT, 2) -
                 std::sqrt(g / kT) / 16.0) +
         5.0 / 16.0 + x * x / (16.0 * w2 * w2 * under * under) - w2 / (32.0 * root) -
         root / w2 - 4.0 * std::pow(kT * g / w2, 2) - std::pow(g / (8.0 * kT), 2) +
         g * g / (2.0 * w2) - 2.0 * kT * g / w2 + g / (8.0 * kT);
}

double crit_asymptotic_direct(const CoupledParams& p, Sector sector) {
  underdamped_ratios(p, sector, "crit_asymptotic_direct");
  const SectorMu mu = sector_mu_asymptotic(p, sector, true);
  return (2.0 * mu.matrix() - choose_c0(p).eta_c0_eta()).determinant();
}

double high_temp_dominant_term(const CoupledParams& p, Sector sector) {
  const auto [w2, g, kT, x, under] = underdamped_ratios(p, sector, "high_temp_dominant_term");
  return std::pow(kT * g / w2, 2) * (x / (g * g * under) - 4.0);
}

namespace {

Matrix2 smeared_kernel_core(const SectorMu& mu, const std::optional<SmearingChoice>& c0) {
  Matrix2 n = 2.0 * mu.matrix();
  if (c0) n -= c0->eta_c0_eta();
  return n;
}

Matrix2 backward_flow(double t, const SectorFlowContext& flow) {
  return characteristic_flow(-t, flow.m, flow.gamma, flow.omega, flow.variant);
}

}  // namespace

SectorExpectations duan_expectations(double t, const SectorMu& mu,
                                     const std::optional<SmearingChoice>& c0,
                                     const SectorFlowContext& flow) {
  const Matrix2 e = backward_flow(t, flow);
  const Matrix2 x = e.transpose() * smeared_kernel_core(mu, c0) * e;
  Matrix2 m1 = Matrix2::Zero();
  Matrix2 m2 = Matrix2::Zero();
  m1(0, 0) = 1.0;
  m2(1, 1) = 1.0;
  return {(m1 * x).trace(), (m2 * x).trace()};
}

SectorExpectations duan_expectations_quadratic(double t, const SectorMu& mu,
                                               const std::optional<SmearingChoice>& c0,
                                               const SectorFlowContext& flow) {
  const Matrix2 e = backward_flow(t, flow);
  const Matrix2 n = smeared_kernel_core(mu, c0);
  const Vector2 v1 = e.col(0);
  const Vector2 v2 = e.col(1);
  return {v1.dot(n * v1), v2.dot(n * v2)};
}

SectorExpectations duan_expectations_u_form(double t, const SectorMu& mu,
                                            const std::optional<SmearingChoice>& c0,
                                            const SectorFlowContext& flow) {
  const double a2 = flow.omega * flow.omega - flow.gamma * flow.gamma;
  if (!(a2 > 0.0)) throw std::domain_error("duan_expectations_u_form: needs an underdamped sector");
  const double a = std::sqrt(a2);
  const double g = flow.gamma;
  const double m = flow.m;
  // Columns of E_{-t} are e^{gamma t} L_k u; the (1,1) flow entry carries
  // +gamma (printed) or -gamma (ode) at +t, hence the opposite sign at -t.
  const double top = flow.variant == FlowVariant::PaperPrinted ? -g / a : g / a;
  Matrix2 l1;
  l1 << 1.0, top, 0.0, -m * flow.omega * flow.omega / a;
  Matrix2 l2;
  l2 << 0.0, 1.0 / (m * a), 1.0, -g / a;
  const Vector2 u(std::cos(a * t), std::sin(a * t));
  const Matrix2 n = smeared_kernel_core(mu, c0);
  const double scale = std::exp(2.0 * g * t);
  return {scale * u.dot(l1.transpose() * n * l1 * u), scale * u.dot(l2.transpose() * n * l2 * u)};
}

namespace {

// The kernels are congruences P^T N P with P growing like e^{gamma t}, so
// their small symplectic eigenvalues drown in rounding long before the
// exponentials overflow. The products are formed in wide binary floating
// point, which is exact for double inputs over the parameter ranges the scans
// reach.
using Wide = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<1024, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

struct WideSym {
  Wide a, b, c;
  Wide det() const { return a * c - b * b; }
};

struct WideKernel {
  WideSym value;
  /// False when the congruence identity det = det(P)^2 det(N) is violated,
  /// i.e. the working precision was exhausted.
  bool exact = true;
};

WideKernel congruence(const Matrix2& n, const Matrix2& p) {
  Wide out[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      Wide sum = 0;
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) sum += Wide(p(k, i)) * Wide(0.5 * (n(k, l) + n(l, k))) * Wide(p(l, j));
      }
      out[i][j] = sum;
    }
  }
  WideKernel kernel{{out[0][0], out[0][1], out[1][1]}, true};
  const Wide det_p = Wide(p(0, 0)) * Wide(p(1, 1)) - Wide(p(0, 1)) * Wide(p(1, 0));
  const Wide n01 = Wide(0.5 * (n(0, 1) + n(1, 0)));
  const Wide expected = det_p * det_p * (Wide(n(0, 0)) * Wide(n(1, 1)) - n01 * n01);
  const Wide scale = abs(kernel.value.a * kernel.value.c) + abs(expected) + Wide(1e-300);
  kernel.exact = abs(kernel.value.det() - expected) <= Wide(1e-30) * scale;
  return kernel;
}

// det(x + y) = det x + det y + mixed(x, y)
Wide mixed(const WideSym& x, const WideSym& y) { return x.a * y.c + x.c * y.a - 2 * x.b * y.b; }

/// The two-mode covariance diag(plus, minus) in the sector frame: Wigner
/// validity, then PPT in the particle split. In that split A = B = (plus +
/// minus) / 2 and C = (plus - minus) / 2, so the partially transposed Simon
/// invariant reduces to mixed(plus, minus).
bool separable_sector_pair(const WideKernel& plus, const WideKernel& minus) {
  if (!plus.exact || !minus.exact) return false;
  const Wide floor_det = Wide(0.5 - 1e-12) * Wide(0.5 - 1e-12);
  for (const WideSym* k : {&plus.value, &minus.value}) {
    if (k->a < 0 || k->c < 0 || k->det() < floor_det) return false;
  }
  const Wide det_s = plus.value.det() * minus.value.det();
  const Wide delta = mixed(plus.value, minus.value);
  Wide disc = delta * delta - 4 * det_s;
  if (disc < 0) disc = 0;
  const Wide larger = (delta + sqrt(disc)) / 2;
  if (!(larger > 0)) return false;
  return det_s / larger >= floor_det;
}

}  // namespace

SeparabilityReport certify_at_time(double t, const CoupledParams& p, FlowVariant variant) {
  p.validate();
  const SmearingChoice c0 = p.gamma > 0.0 ? choose_c0(p) : SmearingChoice::isotropic();
  const CoupledPropagator prop = coupled_propagator(t, p, variant);
  SeparabilityReport report;
  report.t = t;

  WideKernel kernels[2];
  WideKernel transport_kernels[2];
  SectorExpectations expectations[2];
  const Propagator* sectors[2] = {&prop.plus, &prop.minus};
  for (int s = 0; s < 2; ++s) {
    const Sector which = s == 0 ? Sector::Plus : Sector::Minus;
    const Propagator& sp = *sectors[s];
    const SectorMu mu{which, sp.mu(0, 0), sp.mu(0, 1), sp.mu(1, 1), t};
    const WignerCondition wc = wigner_condition_sector(t, mu, c0, p.gamma);
    (s == 0 ? report.wigner_plus : report.wigner_minus) = wc.value;
    (s == 0 ? report.wigner_holds_plus : report.wigner_holds_minus) = wc.holds;

    const SectorFlowContext flow{p.m, p.gamma, sector_frequency(p, which), variant};
    expectations[s] = duan_expectations(t, mu, c0, flow);
    const Matrix2 e = backward_flow(t, flow);
    // eta^T E^T N E eta
    kernels[s] = congruence(smeared_kernel_core(mu, c0), e * eta());
    transport_kernels[s] = congruence(sp.noise.matrix() - sp.epsilon * c0.c0() * sp.epsilon.transpose(),
                                      Matrix2::Identity());
  }
  // Var Q1 + Var P2 and Var P1 + Var Q2 of eta^T X eta.
  report.duan_sum_1 = expectations[0].second + expectations[1].first;
  report.duan_sum_2 = expectations[0].first + expectations[1].second;
  report.kernel_ppt = separable_sector_pair(kernels[0], kernels[1]);
  report.transport_kernel_separable = separable_sector_pair(transport_kernels[0], transport_kernels[1]);
  report.certified = report.wigner_holds_plus && report.wigner_holds_minus &&
                     report.duan_sum_1 >= 1.0 && report.duan_sum_2 >= 1.0 && report.kernel_ppt &&
                     report.transport_kernel_separable;
  return report;
}

int onset_sample_count(const CoupledParams& p, double t_max) {
  double per_period = 0.0;
  for (const double w : {p.Omega, p.omega_prime()}) {
    const double a2 = w * w - p.gamma * p.gamma;
    if (a2 > 0.0) per_period = std::max(per_period, 40.0 * t_max * std::sqrt(a2) / (2.0 * std::numbers::pi));
  }
  return std::max(1000, static_cast<int>(std::ceil(per_period)));
}

std::optional<double> certification_onset(const CoupledParams& p, double t_max,
                                          FlowVariant variant) {
  if (!(t_max > 0.0)) throw std::invalid_argument("certification_onset: t_max must be positive");
  const int n = onset_sample_count(p, t_max);
  const auto certified = [&](double t) { return certify_at_time(t, p, variant).certified; };
  std::optional<double> onset;
  double uncertified = 0.0;
  for (int i = n; i >= 1; --i) {
    const double t = t_max * i / n;
    if (!certified(t)) {
      uncertified = t;
      break;
    }
    onset = t;
  }
  if (onset && !certified(uncertified)) onset = bisect_onset(certified, uncertified, *onset);
  return onset;
}

EprSample epr_sample(const GaussianState2& initial, double t, const CoupledParams& p,
                     FlowVariant variant) {
  const GaussianState2 evolved = evolve_covariance_4x4(initial, t, p, variant, Frame::Original);
  const PptResult ppt = simon_ppt_separable(evolved.cov, Bipartition::Particles);
  return {t, ppt.min_symplectic_eigenvalue, !ppt.separable, duan_sums(rotate_cov(evolved.cov))};
}

std::optional<double> separation_time(const GaussianState2& initial, const CoupledParams& p,
                                      FlowVariant variant, double t_max, int samples) {
  if (!(t_max > 0.0)) throw std::invalid_argument("separation_time: t_max must be positive");
  const auto separated = [&](double t) { return !epr_sample(initial, t, p, variant).entangled; };
  if (separated(0.0)) return 0.0;
  const int n = std::max(samples, 2);
  double previous = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double t = t_max * i / n;
    if (separated(t)) return bisect_onset(separated, previous, t);
    previous = t;
  }
  return std::nullopt;
}

}  // namespace disent
