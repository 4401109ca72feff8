#include "disent/disentangle_single.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace disent {

Timescales make_timescales(double t, double gamma, double kT) {
  if (!(gamma > 0.0) || !(kT > 0.0)) {
    throw std::invalid_argument("make_timescales: gamma and kT must be positive");
  }
  const double t0 = 1.0 / std::sqrt(gamma * kT);
  return {t0, t / t0, gamma * t0};
}

CriterionValue diosi_criterion(double t, const SystemParams& params, const DiffusionMatrix& d,
                               FlowVariant variant) {
  params.validate();
  if (params.omega != 0.0) {
    throw std::invalid_argument("diosi_criterion: only the free particle (omega = 0) is supported");
  }
  if (!(d.d_pp > 0.0)) throw std::invalid_argument("diosi_criterion: d_pp must be positive");
  const Cov2 noise = variant == FlowVariant::PaperPrinted
                         ? mu_closed_free(t, d, params.m, params.gamma)
                         : make_propagator(t, params, d, variant).noise;
  const Matrix2 shifted = noise.matrix() - p_offset_c14(params.m, d.d_pp).matrix();
  CriterionValue out;
  out.value = shifted.determinant() - 0.25;
  out.psd = is_psd(shifted);
  out.satisfied = out.psd && out.value >= 0.0;
  return out;
}

double default_t_max(const SystemParams& params, const DiffusionMatrix& d) {
  double scale = 0.0;
  if (params.gamma > 0.0) {
    scale = std::max(scale, 1.0 / params.gamma);
    if (params.kT > 0.0) scale = std::max(scale, 1.0 / std::sqrt(params.gamma * params.kT));
  }
  if (d.d_pp > 0.0) scale = std::max(scale, kiefer_time(params.m, d.d_pp));
  return scale > 0.0 ? 1e3 * scale : 1.0;
}

double bisect_onset(const std::function<bool(double)>& holds, double lo, double hi,
                    double rel_tol) {
  for (int iter = 0; iter < 200 && hi - lo > rel_tol * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::optional<double> disentanglement_time(const SystemParams& params, const DiffusionMatrix& d,
                                           FlowVariant variant, double t_max, int samples) {
  if (!(t_max > 0.0)) throw std::invalid_argument("disentanglement_time: t_max must be positive");
  if (!(d.d_pp > 0.0)) return std::nullopt;
  const auto holds = [&](double t) { return diosi_criterion(t, params, d, variant).satisfied; };
  const int n = std::max(samples, 1000);
  double previous = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double t = t_max * i / n;
    if (holds(t)) return bisect_onset(holds, previous, t);
    previous = t;
  }
  return std::nullopt;
}

double asymptotic_det(double t, const DiffusionMatrix& d) { return 4.0 * d.det() * t * t; }

double kiefer_time(double m, double d_pp) {
  if (!(m > 0.0) || !(d_pp > 0.0)) {
    throw std::invalid_argument("kiefer_time: m and d_pp must be positive");
  }
  return 1.97 * std::sqrt(m / (2.0 * d_pp));
}

PhiTheta phi_theta(double tau, double gamma_t0) {
  if (tau < 0.0 || gamma_t0 < 0.0) {
    throw std::invalid_argument("phi_theta: arguments must be >= 0");
  }
  const double y = gamma_t0 * tau;
  return {8.0 * y * y * y * numerics::phi3(2.0 * y), 4.0 * y * y * numerics::phi2(2.0 * y)};
}

double reduced_criterion(double tau, double gamma_t0) {
  const double x = 2.0 * gamma_t0 * tau;
  const double g2 = gamma_t0 * gamma_t0;
  const double shear = 4.0 * tau * tau * numerics::phi2(x);
  return 2.0 * tau * tau * tau * numerics::phi3(x) * (4.0 * tau - 1.0) + g2 * tau * tau -
         (2.0 + g2 / 4.0) * tau - shear * shear + shear;
}

double tau_star_series(double gamma_t0) {
  if (gamma_t0 < 0.0) throw std::invalid_argument("tau_star_series: gamma_t0 must be >= 0");
  return 0.25 - (25.0 / 48.0) * gamma_t0 * gamma_t0;
}

double tau_star_numeric(double gamma_t0, double kT) {
  if (!(gamma_t0 > 0.0) || !(kT > 0.0)) {
    throw std::invalid_argument("tau_star_numeric: gamma_t0 and kT must be positive");
  }
  SystemParams params;
  params.m = 1.0;
  params.kT = kT;
  params.gamma = gamma_t0 * gamma_t0 * kT;
  const DiffusionMatrix d = minimal_diffusion(params.m, params.gamma, params.kT);
  const auto t_star = disentanglement_time(params, d, FlowVariant::PaperPrinted,
                                           default_t_max(params, d));
  if (!t_star) throw std::runtime_error("tau_star_numeric: no crossing found");
  return *t_star * std::sqrt(params.gamma * params.kT);
}

double tau_star_limit() {
  // reduced_criterion(tau, 0) is negative on (0, tau*) and positive after.
  return bisect_onset([](double tau) { return reduced_criterion(tau, 0.0) >= 0.0; }, 1e-3, 10.0,
                      1e-14);
}

CriterionTrace criterion_trace(const SystemParams& params, const DiffusionMatrix& d,
                               FlowVariant variant, double t_max, int samples) {
  if (samples < 2) throw std::invalid_argument("criterion_trace: samples must be >= 2");
  if (!(t_max > 0.0)) throw std::invalid_argument("criterion_trace: t_max must be positive");
  CriterionTrace trace;
  for (int i = 0; i < samples; ++i) {
    const double t = t_max * i / (samples - 1);
    const CriterionValue c = diosi_criterion(t, params, d, variant);
    trace.times.push_back(t);
    trace.values.push_back(c.value);
    trace.psd_flags.push_back(c.psd);
    trace.satisfied_flags.push_back(c.satisfied);
  }
  const auto first = std::find(trace.satisfied_flags.begin(), trace.satisfied_flags.end(), true);
  if (first != trace.satisfied_flags.end()) {
    const auto idx = static_cast<std::size_t>(first - trace.satisfied_flags.begin());
    if (idx == 0) {
      trace.crossing = 0.0;
    } else {
      trace.crossing = bisect_onset(
          [&](double t) { return diosi_criterion(t, params, d, variant).satisfied; },
          trace.times[idx - 1], trace.times[idx]);
    }
  }
  return trace;
}

}  // namespace disent
