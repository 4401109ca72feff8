#include "disent/cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace disent::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {"m",   "gamma",   "kT",      "Omega",  "omega-c",
                                             "dpp", "dqq",     "dqp",     "diffusion", "variant",
                                             "t-max", "samples", "out",   "seed"};
  return keys;
}

}  // namespace

KeyValues parse_config(std::istream& in) {
  KeyValues out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || !known_keys().contains(key)) {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    out[key] = value;
  }
  return out;
}

KeyValues load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  return parse_config(in);
}

KeyValues merge_settings(const KeyValues& config, const KeyValues& flags) {
  KeyValues out = config;
  for (const auto& [key, value] : flags) out[key] = value;
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw UsageError("--" + key + ": not a finite number: '" + text + "'");
  }
  return value;
}

DiffusionMatrix Scenario::resolved_diffusion() const {
  if (diffusion) return *diffusion;
  if (!(kT > 0.0)) {
    throw UsageError("no diffusion given: pass --dpp/--dqq/--dqp or a positive --kT for minimal diffusion");
  }
  return minimal_diffusion(m, gamma, kT);
}

CoupledParams Scenario::coupled_params() const {
  CoupledParams p{m, gamma, Omega, omega_c, kT, diffusion};
  if (!diffusion && !(kT > 0.0)) {
    throw UsageError("coupled scenario needs --kT > 0 or an explicit diffusion");
  }
  return p;
}

Scenario resolve_scenario(const KeyValues& settings) {
  Scenario s;
  auto number = [&](const std::string& key, double& target) {
    if (const auto it = settings.find(key); it != settings.end()) {
      target = parse_number(key, it->second);
    }
  };
  number("m", s.m);
  number("gamma", s.gamma);
  number("kT", s.kT);
  number("Omega", s.Omega);
  number("omega-c", s.omega_c);
  if (!(s.m > 0.0)) throw UsageError("--m must be positive");
  if (s.gamma < 0.0 || s.kT < 0.0 || s.Omega < 0.0 || s.omega_c < 0.0) {
    throw UsageError("--gamma, --kT, --Omega and --omega-c must be >= 0");
  }

  const bool explicit_d = settings.contains("dpp") || settings.contains("dqq") || settings.contains("dqp");
  if (const auto it = settings.find("diffusion"); it != settings.end()) {
    if (it->second != "minimal") throw UsageError("--diffusion accepts only 'minimal'");
    if (explicit_d) throw UsageError("--diffusion minimal conflicts with explicit --dpp/--dqq/--dqp");
  }
  if (explicit_d) {
    DiffusionMatrix d;
    number("dpp", d.d_pp);
    number("dqq", d.d_qq);
    number("dqp", d.d_qp);
    s.diffusion = d;
  }

  if (const auto it = settings.find("variant"); it != settings.end()) {
    if (it->second == "printed") {
      s.variant = FlowVariant::PaperPrinted;
    } else if (it->second == "ode") {
      s.variant = FlowVariant::OdeConsistent;
    } else {
      throw UsageError("--variant must be 'printed' or 'ode'");
    }
  }
  if (const auto it = settings.find("t-max"); it != settings.end()) {
    const double t_max = parse_number("t-max", it->second);
    if (!(t_max > 0.0)) throw UsageError("--t-max must be positive");
    s.t_max = t_max;
  }
  if (const auto it = settings.find("samples"); it != settings.end()) {
    const double samples = parse_number("samples", it->second);
    if (samples < 2.0 || samples != std::floor(samples) || samples > 1e8) {
      throw UsageError("--samples must be an integer >= 2");
    }
    s.samples = static_cast<int>(samples);
  }
  if (const auto it = settings.find("out"); it != settings.end()) s.out = it->second;
  if (const auto it = settings.find("seed"); it != settings.end()) {
    try {
      std::size_t used = 0;
      s.seed = std::stoull(it->second, &used);
      if (used != it->second.size() || it->second.find('-') != std::string::npos) {
        throw std::invalid_argument("seed");
      }
    } catch (const std::exception&) {
      throw UsageError("--seed must be a non-negative integer");
    }
  }
  return s;
}

}  // namespace disent::cli
