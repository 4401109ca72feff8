#include "disent/cli/oracle.hpp"

#include "disent/dynamics_coupled.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace disent::cli {

namespace {

constexpr std::array<double, 5> kGammaGrid = {0.0, 0.01, 0.1, 0.5, 2.0};
constexpr std::array<double, 5> kTemperatureGrid = {0.1, 1.0, 10.0, 100.0, 1000.0};
constexpr std::array<double, 5> kTimeGrid = {0.01, 0.3, 2.0, 10.0, 50.0};
constexpr double kMass = 1.0;
constexpr double kWellFrequency = 1.0;
constexpr double kCouplingFrequency = 0.5;

template <typename Derived>
double relative_error(const Eigen::MatrixBase<Derived>& candidate,
                      const Eigen::MatrixBase<Derived>& oracle) {
  const double scale = std::max(1.0, oracle.cwiseAbs().maxCoeff());
  return (candidate - oracle).cwiseAbs().maxCoeff() / scale;
}

std::string describe(std::initializer_list<std::pair<const char*, double>> fields) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, value] : fields) {
    os << (first ? "" : ", ") << name << " = " << value;
    first = false;
  }
  return os.str();
}

OracleSuiteResult named_suite(std::string name) {
  OracleSuiteResult suite;
  suite.name = std::move(name);
  return suite;
}

void record(OracleSuiteResult& suite, double error, std::string where) {
  ++suite.cases;
  if (std::isnan(error)) error = std::numeric_limits<double>::infinity();
  if (suite.cases == 1 || error > suite.worst_error) {
    suite.worst_error = error;
    suite.worst_case = std::move(where);
  }
}

/// Random Wigner-valid single-mode state: a thermal covariance squeezed and
/// rotated, plus a displacement.
GaussianState1 random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double nu = 0.5 + 2.0 * unit(rng);
  const double r = -1.0 + 2.0 * unit(rng);
  const double theta = 2.0 * M_PI * unit(rng);
  Matrix2 rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const Matrix2 squeeze = Eigen::Vector2d(std::exp(r), std::exp(-r)).asDiagonal();
  const Matrix2 s = rot * squeeze;
  GaussianState1 out;
  out.mean = Vector2(normal(rng), normal(rng));
  out.cov = Cov2(nu * s * s.transpose());
  return out;
}

OracleSuiteResult free_noise_suite(const OracleOptions& options) {
  OracleSuiteResult suite = named_suite("mu_closed_free vs quadrature");
  for (double gamma : kGammaGrid) {
    for (double kT : kTemperatureGrid) {
      const DiffusionMatrix d = oracle_diffusion(kMass, gamma, kT);
      for (double t : kTimeGrid) {
        const Matrix2 closed = (1.0 + options.perturb) * mu_closed_free(t, d, kMass, gamma).matrix();
        const Cov2 mu = mu_quadrature(t, d, [&](double s) {
          return characteristic_flow(s, kMass, gamma, 0.0, FlowVariant::PaperPrinted);
        });
        const Matrix2 oracle = 2.0 * eta_conjugate(mu.matrix());
        record(suite, relative_error(closed, oracle),
               describe({{"gamma", gamma}, {"kT", kT}, {"t", t}}));
      }
    }
  }
  return suite;
}

OracleSuiteResult sector_noise_suite(const OracleOptions& options) {
  OracleSuiteResult suite = named_suite(std::string("sector_mu_closed vs quadrature (") + to_string(options.variant) + ")");
  for (double gamma : kGammaGrid) {
    CoupledParams p;
    p.m = kMass;
    p.gamma = gamma;
    p.Omega = kWellFrequency;
    p.omega_c = kCouplingFrequency;
    for (double kT : kTemperatureGrid) {
      const DiffusionMatrix d = oracle_diffusion(kMass, gamma, kT);
      for (Sector sector : {Sector::Plus, Sector::Minus}) {
        const double w = sector_frequency(p, sector);
        for (double t : kTimeGrid) {
          const Matrix2 closed =
              (1.0 + options.perturb) *
              sector_mu_closed(t, d.d_pp, d.d_qq, kMass, gamma, w, options.variant).matrix();
          const Matrix2 oracle = mu_quadrature(t, DiffusionMatrix{d.d_qq, 0.0, d.d_pp}, [&](double s) {
                                   return characteristic_flow(s, kMass, gamma, w, options.variant);
                                 }).matrix();
          record(suite, relative_error(closed, oracle),
                 describe({{"gamma", gamma},
                           {"kT", kT},
                           {"t", t},
                           {"sector", sector == Sector::Plus ? 0.0 : 1.0}}));
        }
      }
    }
  }
  return suite;
}

OracleSuiteResult single_propagation_suite(const OracleOptions& options, std::mt19937_64& rng) {
  OracleSuiteResult suite = named_suite(std::string("propagate_gaussian vs moment ODE (") +
                          to_string(options.variant) + ")");
  suite.informational = options.variant == FlowVariant::PaperPrinted;
  for (double gamma : kGammaGrid) {
    for (double omega : {0.0, kWellFrequency}) {
      for (double kT : {1.0, 100.0}) {
        const SystemParams params{kMass, gamma, omega, kT};
        const DiffusionMatrix d = oracle_diffusion(kMass, gamma, kT);
        for (double t : {0.3, 2.0, 10.0}) {
          const GaussianState1 initial = random_state(rng);
          GaussianState1 closed = propagate_gaussian(initial, make_propagator(t, params, d, options.variant));
          closed.mean *= 1.0 + options.perturb;
          closed.cov = Cov2((1.0 + options.perturb) * closed.cov.matrix());
          const GaussianState1 oracle = moment_ode_oracle(initial, params, d, t, 64);
          const double error = std::max(relative_error(closed.cov.matrix(), oracle.cov.matrix()),
                                        relative_error(closed.mean, oracle.mean));
          record(suite, error,
                 describe({{"gamma", gamma}, {"Omega", omega}, {"kT", kT}, {"t", t}}));
        }
      }
    }
  }
  return suite;
}

OracleSuiteResult coupled_propagation_suite(const OracleOptions& options, std::mt19937_64& rng) {
  OracleSuiteResult suite = named_suite(std::string("coupled evolution vs moment ODE (") +
                          to_string(options.variant) + ")");
  suite.informational = options.variant == FlowVariant::PaperPrinted;
  for (double gamma : {0.0, 0.1, 0.5}) {
    CoupledParams p;
    p.m = kMass;
    p.gamma = gamma;
    p.Omega = kWellFrequency;
    p.omega_c = kCouplingFrequency;
    p.kT = 10.0;
    if (gamma == 0.0) p.diffusion_override = oracle_diffusion(kMass, gamma, p.kT);
    for (double t : {0.3, 2.0}) {
      GaussianState2 initial;
      const GaussianState1 a = random_state(rng);
      const GaussianState1 b = random_state(rng);
      Matrix4 cov = Matrix4::Zero();
      cov.block<2, 2>(0, 0) = a.cov.matrix();
      cov.block<2, 2>(2, 2) = b.cov.matrix();
      initial.cov = Cov4(cov);
      initial.mean << a.mean, b.mean;
      GaussianState2 closed = evolve_covariance_4x4(initial, t, p, options.variant);
      closed.mean *= 1.0 + options.perturb;
      closed.cov = Cov4((1.0 + options.perturb) * closed.cov.matrix());
      const GaussianState2 oracle = coupled_moment_oracle(initial, p, t, 64);
      const double error = std::max(relative_error(closed.cov.matrix(), oracle.cov.matrix()),
                                    relative_error(closed.mean, oracle.mean));
      record(suite, error, describe({{"gamma", gamma}, {"t", t}}));
    }
  }
  return suite;
}

/// Central-difference residual of dE/ds = Fbar E for the characteristic flow.
OracleSuiteResult flow_residual_suite(const OracleOptions& options) {
  OracleSuiteResult suite = named_suite(std::string("characteristic flow ODE residual (") +
                          to_string(options.variant) + ")");
  suite.informational = options.variant == FlowVariant::PaperPrinted;
  // Central differences carry O(h^2) truncation error.
  suite.tolerance = 1e-6;
  constexpr double h = 1e-5;
  for (double gamma : kGammaGrid) {
    for (double omega : {0.0, 0.5, kWellFrequency, 3.0}) {
      const Matrix2 drift = characteristic_drift(kMass, gamma, omega);
      for (double s : {0.3, 2.0, 10.0}) {
        const auto flow = [&](double x) {
          return characteristic_flow(x, kMass, gamma, omega, options.variant);
        };
        const Matrix2 derivative = (flow(s + h) - flow(s - h)) / (2.0 * h);
        const Matrix2 expected = drift * flow(s);
        record(suite, relative_error(derivative, expected),
               describe({{"gamma", gamma}, {"Omega", omega}, {"s", s}}));
      }
    }
  }
  return suite;
}

}  // namespace

DiffusionMatrix oracle_diffusion(double m, double gamma, double kT) {
  if (gamma > 0.0) return minimal_diffusion(m, gamma, kT);
  return DiffusionMatrix{0.0, 0.0, kT / 2.0};
}

bool OracleReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const OracleSuiteResult& s) { return s.passed(); });
}

OracleReport run_oracle_suite(const OracleOptions& options) {
  std::mt19937_64 rng(options.seed);
  OracleReport report;
  report.suites.push_back(free_noise_suite(options));
  report.suites.push_back(sector_noise_suite(options));
  report.suites.push_back(single_propagation_suite(options, rng));
  report.suites.push_back(coupled_propagation_suite(options, rng));
  for (auto& suite : report.suites) suite.tolerance = options.tolerance;
  report.suites.push_back(flow_residual_suite(options));
  return report;
}

}  // namespace disent::cli
