#pragma once

// Built-in cross-checks of the closed forms against independent oracles:
// adaptive quadrature for the noise integrals and RK4 moment integration for
// the propagators.

#include "disent/dynamics_single.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace disent::cli {

struct OracleOptions {
  FlowVariant variant = FlowVariant::OdeConsistent;
  std::uint64_t seed = 20240611;
  /// Relative perturbation applied to every closed-form result; a nonzero
  /// value must make the suite fail.
  double perturb = 0.0;
  /// Bound for the closed-form suites. The finite-difference flow residual
  /// always uses 1e-6.
  double tolerance = 1e-8;
};

/// Largest error seen by one suite and the grid point where it occurred.
struct OracleSuiteResult {
  std::string name;
  double worst_error = 0.0;
  std::string worst_case;
  int cases = 0;
  double tolerance = 1e-8;
  /// Informational suites are reported but never fail the run.
  bool informational = false;

  bool passed() const { return informational || worst_error <= tolerance; }
};

struct OracleReport {
  std::vector<OracleSuiteResult> suites;

  bool passed() const;
};

/// Grids: gamma in {0, 0.01, 0.1, 0.5, 2}, kT in {0.1, 1, 10, 100, 1000} and
/// t in {0.01, 0.3, 2, 10, 50}. Errors are max-entry differences divided by
/// max(1, largest entry of the oracle result).
OracleReport run_oracle_suite(const OracleOptions& options);

/// Noise integral used by the grid: minimal diffusion when gamma > 0, and
/// d_pp = kT / 2 with d_qq = d_qp = 0 at gamma = 0.
DiffusionMatrix oracle_diffusion(double m, double gamma, double kT);

}  // namespace disent::cli
