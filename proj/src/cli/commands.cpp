#include "disent/cli/commands.hpp"

#include "disent/cli/csv.hpp"
#include "disent/cli/oracle.hpp"
#include "disent/cli/scenario.hpp"
#include "disent/disentangle_single.hpp"
#include "disent/dynamics_coupled.hpp"
#include "disent/separability.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>

namespace disent::cli {

namespace {

const char* const kScenarioKeys[] = {"m",   "gamma", "kT",    "Omega",   "omega-c",
                                     "dpp", "dqq",   "dqp",   "t-max",   "samples",
                                     "out", "seed",  "variant", "diffusion"};

/// Per-command options beyond the shared scenario flags.
struct Extras {
  std::vector<std::string> gamma_t0;
  std::string squeezing = "1";
  std::string perturb = "0";
};

struct Context {
  Scenario scenario;
  KeyValues settings;
  Extras extras;
  std::ostream& out;
  std::ostream& err;
  std::unique_ptr<std::ofstream> file;

  std::ostream& csv() {
    if (scenario.out.empty()) return out;
    if (!file) {
      file = std::make_unique<std::ofstream>(scenario.out);
      if (!*file) throw UsageError("cannot open output file '" + scenario.out + "'");
    }
    return *file;
  }
};

std::string fmt(double v) { return format_number(v); }

double flag(bool b) { return b ? 1.0 : 0.0; }

int cmd_lindblad_check(Context& ctx) {
  if (!ctx.settings.contains("m")) throw UsageError("--m is required");
  const Scenario& s = ctx.scenario;
  const DiffusionMatrix d = s.resolved_diffusion();
  const double det = d.det();
  const double bound = s.gamma * s.gamma / (4.0 * s.m * s.m);
  const bool valid = lindblad_valid(d, s.m, s.gamma);
  ctx.out << "det_D = " << fmt(det) << "\n";
  ctx.out << "bound = " << fmt(bound) << "\n";
  ctx.out << "d_qq = " << fmt(d.d_qq) << ", d_pp = " << fmt(d.d_pp) << "\n";
  if (std::abs(det - bound) <= 1e-14 * std::max(bound, 1e-300) || (det == 0.0 && bound == 0.0)) {
    ctx.out << "note: det D saturates the bound (boundary of Lindblad form)\n";
  }
  ctx.out << "verdict: " << (valid ? "valid" : "invalid") << "\n";
  return valid ? kExitOk : kExitVerdict;
}

void require_free_scenario(const Scenario& s, const DiffusionMatrix& d) {
  if (s.Omega != 0.0) throw UsageError("this command needs a free particle (--Omega 0)");
  if (!(d.d_pp > 0.0)) throw UsageError("this command needs d_pp > 0");
}

int cmd_single_trace(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const DiffusionMatrix d = s.resolved_diffusion();
  require_free_scenario(s, d);
  const SystemParams params = s.single_params();
  const double t_max = s.t_max.value_or(default_t_max(params, d));
  const CriterionTrace trace = criterion_trace(params, d, s.variant, t_max, s.samples);
  CsvWriter csv(ctx.csv(), {"t", "det_value", "psd", "satisfied"});
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    csv.row({trace.times[i], trace.values[i], flag(trace.psd_flags[i]), flag(trace.satisfied_flags[i])});
  }
  if (trace.crossing) {
    ctx.out << "# crossing t* = " << fmt(*trace.crossing) << "\n";
  } else {
    ctx.out << "# not disentangled by t_max = " << fmt(t_max) << "\n";
  }
  return kExitOk;
}

int cmd_disentangle_time(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const DiffusionMatrix d = s.resolved_diffusion();
  require_free_scenario(s, d);
  const SystemParams params = s.single_params();
  const double t_max = s.t_max.value_or(default_t_max(params, d));
  const auto t_star = disentanglement_time(params, d, s.variant, t_max, s.samples);
  if (!t_star) {
    ctx.out << "not disentangled by t_max = " << fmt(t_max) << "\n";
    return kExitVerdict;
  }
  ctx.out << "t_star = " << fmt(*t_star) << "\n";
  ctx.out << "kiefer_estimate = " << fmt(kiefer_time(s.m, d.d_pp)) << "\n";
  if (s.gamma > 0.0 && s.kT > 0.0) {
    ctx.out << "tau_star = " << fmt(make_timescales(*t_star, s.gamma, s.kT).tau) << "\n";
  }
  return kExitOk;
}

int cmd_kiefer(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const DiffusionMatrix d = s.resolved_diffusion();
  if (!(d.d_pp > 0.0)) throw UsageError("kiefer needs d_pp > 0");
  ctx.out << "kiefer_time = " << fmt(kiefer_time(s.m, d.d_pp)) << "\n";
  return kExitOk;
}

int cmd_tau_star_scan(Context& ctx) {
  std::vector<double> values;
  for (const auto& item : ctx.extras.gamma_t0) {
    const double g = parse_number("gamma-t0", item);
    if (g < 0.0) throw UsageError("--gamma-t0 values must be >= 0");
    values.push_back(g);
  }
  if (values.empty()) throw UsageError("--gamma-t0 needs at least one value");
  const double kT = ctx.scenario.kT > 0.0 ? ctx.scenario.kT : 1.0;
  CsvWriter csv(ctx.csv(), {"gamma_t0", "tau_numeric", "tau_series", "abs_diff"});
  for (double g : values) {
    // t0 is undefined at gamma = 0, so that row reports the limiting values.
    const double numeric = g > 0.0 ? tau_star_numeric(g, kT) : tau_star_limit();
    const double series = tau_star_series(g);
    csv.row({g, numeric, series, std::abs(numeric - series)});
    if (g == 0.0) ctx.out << "# gamma_t0 = 0 row uses limit mode\n";
  }
  return kExitOk;
}

const char* sector_name(Sector sector) { return sector == Sector::Plus ? "plus" : "minus"; }

/// Checks the asymptotic regime of each sector. Returns false when a sector is
/// overdamped or its asymptotic criterion is negative.
bool report_regime(Context& ctx, const CoupledParams& p) {
  const bool minimal = !p.diffusion_override.has_value();
  if (!(p.gamma > 0.0)) {
    ctx.out << "# gamma = 0: no asymptotic regime check\n";
    return true;
  }
  bool ok = true;
  for (Sector sector : {Sector::Plus, Sector::Minus}) {
    const double w = sector_frequency(p, sector);
    if (!(w > p.gamma)) {
      ctx.out << "# sector " << sector_name(sector) << ": overdamped (Omega = " << fmt(w)
              << " <= gamma = " << fmt(p.gamma) << "); Omega^2 - gamma^2 = " << fmt(w * w - p.gamma * p.gamma)
              << ", dominant term unavailable\n";
      ok = false;
      continue;
    }
    if (!minimal) {
      ctx.out << "# sector " << sector_name(sector) << ": explicit diffusion, asymptotic criterion skipped\n";
      continue;
    }
    const double crit = crit_asymptotic(p, sector);
    ctx.out << "# sector " << sector_name(sector) << ": crit = " << fmt(crit)
            << ", dominant term = " << fmt(high_temp_dominant_term(p, sector)) << "\n";
    if (crit < 0.0) {
      ctx.out << "# sector " << sector_name(sector) << ": asymptotic criterion negative\n";
      ok = false;
    }
  }
  return ok;
}

int cmd_coupled_certify(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const CoupledParams p = s.coupled_params();
  p.validate();
  const double t_max = s.t_max.value_or(p.gamma > 0.0 ? 20.0 / p.gamma : 100.0);
  const bool regime_ok = report_regime(ctx, p);

  CsvWriter csv(ctx.csv(), {"t", "wigner_plus", "wigner_minus", "duan_sum_1", "duan_sum_2", "certified"});
  for (int i = 0; i < s.samples; ++i) {
    const double t = t_max * i / (s.samples - 1);
    const SeparabilityReport r = certify_at_time(t, p, s.variant);
    csv.row({t, r.wigner_plus, r.wigner_minus, r.duan_sum_1, r.duan_sum_2, flag(r.certified)});
  }
  const auto onset = certification_onset(p, t_max, s.variant);
  if (onset) {
    ctx.out << "# certification onset t_c = " << fmt(*onset) << "\n";
  } else {
    ctx.out << "# certification onset: none by t_max = " << fmt(t_max) << "\n";
  }
  if (p.omega_c == 0.0) {
    const DiffusionMatrix d = p.diffusion();
    if (p.Omega == 0.0 && d.d_pp > 0.0) {
      const SystemParams single{p.m, p.gamma, 0.0, p.kT};
      const auto t_single = disentanglement_time(single, d, s.variant, default_t_max(single, d));
      ctx.out << "# uncoupled: single-particle disentanglement time = "
              << (t_single ? fmt(*t_single) : std::string("none")) << "\n";
    } else {
      ctx.out << "# uncoupled: no single-particle reference for Omega > 0\n";
    }
  }
  return regime_ok ? kExitOk : kExitVerdict;
}

int cmd_epr_demo(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const double r = parse_number("r", ctx.extras.squeezing);
  if (r < 0.0) throw UsageError("--r must be >= 0");
  const CoupledParams p = s.coupled_params();
  p.validate();
  const double t_max = s.t_max.value_or(p.gamma > 0.0 ? 10.0 / p.gamma : 10.0);
  const GaussianState2 initial = two_mode_squeezed(r);
  CsvWriter csv(ctx.csv(), {"t", "min_symplectic_eig", "entangled", "duan_sum_1", "duan_sum_2"});
  for (int i = 0; i < s.samples; ++i) {
    const double t = t_max * i / (s.samples - 1);
    const EprSample sample = epr_sample(initial, t, p, s.variant);
    csv.row({t, sample.min_symplectic_eigenvalue, flag(sample.entangled), sample.duan.first,
             sample.duan.second});
  }
  const EprSample start = epr_sample(initial, 0.0, p, s.variant);
  ctx.out << "# t = 0: min symplectic eigenvalue = " << fmt(start.min_symplectic_eigenvalue)
          << (start.entangled ? " (entangled)" : " (separable)") << "\n";
  const auto t_sep = separation_time(initial, p, s.variant, t_max, s.samples);
  if (t_sep) {
    ctx.out << "# separation time = " << fmt(*t_sep) << "\n";
  } else {
    ctx.out << "# separation time: none by t_max = " << fmt(t_max) << "\n";
  }
  return kExitOk;
}

int cmd_oracle_verify(Context& ctx) {
  OracleOptions options;
  options.variant = ctx.settings.contains("variant") ? ctx.scenario.variant : FlowVariant::OdeConsistent;
  options.seed = ctx.scenario.seed;
  options.perturb = parse_number("perturb", ctx.extras.perturb);
  const OracleReport report = run_oracle_suite(options);
  for (const auto& suite : report.suites) {
    ctx.out << (suite.informational ? "info " : suite.passed() ? "ok   " : "FAIL ") << suite.name << ": worst error "
            << fmt(suite.worst_error) << " (tolerance " << fmt(suite.tolerance) << ", " << suite.cases
            << " cases) at " << suite.worst_case << (suite.informational ? " [informational]" : "")
            << "\n";
  }
  ctx.out << (report.passed() ? "oracle-verify: pass" : "oracle-verify: FAIL") << "\n";
  return report.passed() ? kExitOk : kExitFailure;
}

using Handler = std::function<int(Context&)>;

struct Command {
  const char* name;
  const char* description;
  Handler handler;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"lindblad-check", "Check the Lindblad condition det D >= gamma^2 / (4 m^2)", cmd_lindblad_check},
      {"single-trace", "Free-particle disentanglement criterion over [0, t_max] (CSV)", cmd_single_trace},
      {"disentangle-time", "First time the free-particle criterion holds", cmd_disentangle_time},
      {"kiefer", "Disentanglement timescale estimate at gamma = 0", cmd_kiefer},
      {"tau-star-scan", "Dimensionless crossing time against its small gamma_t0 series (CSV)",
       cmd_tau_star_scan},
      {"coupled-certify", "Separability certificate scan for two coupled particles (CSV)",
       cmd_coupled_certify},
      {"epr-demo", "Evolution of a two-mode squeezed state under the coupled dynamics (CSV)",
       cmd_epr_demo},
      {"oracle-verify", "Cross-check closed forms against quadrature and moment ODEs", cmd_oracle_verify},
  };
  return list;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian disentanglement and separability toolkit", "disent"};
  app.require_subcommand(1);
  KeyValues flags;
  std::string config_path;
  Extras extras;

  std::map<CLI::App*, const Command*> dispatch;
  for (const Command& command : commands()) {
    CLI::App* sub = app.add_subcommand(command.name, command.description);
    dispatch[sub] = &command;
    sub->add_option("--config", config_path, "Scenario file with key = value lines");
    for (const char* key : kScenarioKeys) {
      const std::string name = key;
      sub->add_option_function<std::string>(
          "--" + name, [&flags, name](const std::string& v) { flags[name] = v; }, "Scenario value '" + name + "'");
    }
    const std::string cmd = command.name;
    if (cmd == "tau-star-scan") {
      sub->add_option("--gamma-t0", extras.gamma_t0, "Comma-separated gamma t0 values")->delimiter(',');
    } else if (cmd == "epr-demo") {
      sub->add_option("--r", extras.squeezing, "Two-mode squeezing parameter (default 1)");
    } else if (cmd == "oracle-verify") {
      sub->add_option("--perturb", extras.perturb, "Relative fault injected into the closed forms");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    const KeyValues config = config_path.empty() ? KeyValues{} : load_config(config_path);
    Context ctx{Scenario{}, merge_settings(config, flags), extras, out, err, nullptr};
    ctx.scenario = resolve_scenario(ctx.settings);
    if (ctx.scenario.diffusion && !lindblad_valid(*ctx.scenario.diffusion, ctx.scenario.m, ctx.scenario.gamma)) {
      err << "warning: diffusion violates the Lindblad condition det D >= gamma^2 / (4 m^2)\n";
    }
    return dispatch.at(active)->handler(ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace disent::cli
