#pragma once

// Complete-disentanglement criterion for a free dissipative particle:
// g(M_t - C_{1/4}) must be a Wigner function.

#include "disent/dynamics_single.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace disent {

struct Timescales {
  double t0 = 0.0;
  double tau = 0.0;
  double gamma_t0 = 0.0;
};

/// t0 = 1 / sqrt(gamma kT); requires gamma, kT > 0.
Timescales make_timescales(double t, double gamma, double kT);

struct CriterionValue {
  /// det(M_t - C_{1/4}) - 1/4
  double value = 0.0;
  bool psd = false;
  bool satisfied = false;
};

/// Rejects omega != 0 and d_pp <= 0 with std::invalid_argument.
CriterionValue diosi_criterion(double t, const SystemParams& params, const DiffusionMatrix& d,
                               FlowVariant variant);

/// 10^3 max(t0, 1/gamma, kiefer_time), using whichever of the three are defined.
double default_t_max(const SystemParams& params, const DiffusionMatrix& d);

/// First time in (0, t_max] at which the criterion holds, or nullopt.
std::optional<double> disentanglement_time(const SystemParams& params, const DiffusionMatrix& d,
                                           FlowVariant variant, double t_max,
                                           int samples = 1000);

double asymptotic_det(double t, const DiffusionMatrix& d);

double kiefer_time(double m, double d_pp);

struct PhiTheta {
  double phi = 0.0;
  double theta = 0.0;
};

PhiTheta phi_theta(double tau, double gamma_t0);

/// The criterion value for minimal diffusion written in units of t0. It does
/// not depend on the mass.
double reduced_criterion(double tau, double gamma_t0);

double tau_star_series(double gamma_t0);

/// Crossing time in units of t0 for m = 1, gamma = gamma_t0^2 kT and minimal
/// diffusion, from the PaperPrinted criterion.
double tau_star_numeric(double gamma_t0, double kT = 1.0);

/// Limit of tau_star_numeric as gamma_t0 -> 0: the first root of
/// reduced_criterion(tau, 0).
double tau_star_limit();

struct CriterionTrace {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<bool> psd_flags;
  std::vector<bool> satisfied_flags;
  std::optional<double> crossing;
};

/// `samples` uniform times on [0, t_max]; the crossing is refined between the
/// last unsatisfied and first satisfied sample.
CriterionTrace criterion_trace(const SystemParams& params, const DiffusionMatrix& d,
                               FlowVariant variant, double t_max, int samples);

/// Bisection on a predicate that is false at `lo` and true at `hi`, to
/// relative width `rel_tol`. Returns the upper end.
double bisect_onset(const std::function<bool(double)>& holds, double lo, double hi,
                    double rel_tol = 1e-10);

}  // namespace disent
