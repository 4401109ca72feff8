#pragma once

// Scenario configuration: `key = value` files with `#` comments, overridden
// by command-line flags of the same names.

#include "disent/dynamics_coupled.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace disent::cli {

/// Malformed arguments or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config(std::istream& in);
KeyValues load_config(const std::string& path);

/// Flags win over config entries.
KeyValues merge_settings(const KeyValues& config, const KeyValues& flags);

struct Scenario {
  double m = 1.0;
  double gamma = 0.0;
  double Omega = 0.0;
  double omega_c = 0.0;
  double kT = 0.0;
  /// Explicit diffusion; minimal diffusion is used when unset.
  std::optional<DiffusionMatrix> diffusion;
  FlowVariant variant = FlowVariant::PaperPrinted;
  std::optional<double> t_max;
  int samples = 1000;
  std::string out;
  std::uint64_t seed = 20240611;

  /// Explicit diffusion, or minimal diffusion when kT > 0. Throws UsageError
  /// if neither is available.
  DiffusionMatrix resolved_diffusion() const;
  SystemParams single_params() const { return {m, gamma, Omega, kT}; }
  CoupledParams coupled_params() const;
};

/// Recognised keys: m, gamma, kT, Omega, omega-c, dpp, dqq, dqp, diffusion
/// (= minimal), variant (printed | ode), t-max, samples, out, seed.
Scenario resolve_scenario(const KeyValues& settings);

/// Parses a double, throwing UsageError naming `key` on failure.
double parse_number(const std::string& key, const std::string& text);

}  // namespace disent::cli
