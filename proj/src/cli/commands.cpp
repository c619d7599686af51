#include "lipwalk/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "lipwalk/cli/config.hpp"
#include "lipwalk/cli/csv.hpp"
#include "lipwalk/cli/svg.hpp"
#include "lipwalk/errors.hpp"

namespace fs = std::filesystem;

namespace lipwalk::cli {

namespace {

struct Invocation {
  std::string config_path;
  std::string out_dir;
  std::string formats;
};

std::string f4(double v) {
  std::ostringstream os;
  // Values that round to zero print without a sign.
  os << std::fixed << std::setprecision(4) << (std::abs(v) < 5e-5 ? 0.0 : v);
  return os.str();
}

std::string f4(const std::complex<double>& z) {
  if (z.imag() == 0.0) return f4(z.real());
  return f4(z.real()) + (z.imag() < 0.0 ? "-" : "+") + f4(std::abs(z.imag())) + "i";
}

ScenarioConfig resolve(const Invocation& inv, bool config_required) {
  ScenarioConfig cfg;
  if (!inv.config_path.empty()) {
    cfg = load_config(inv.config_path);
  } else if (config_required) {
    throw ConfigError("--config is required");
  }
  if (!inv.out_dir.empty()) cfg.run.output_dir = inv.out_dir;
  if (!inv.formats.empty()) apply_formats(cfg.run, inv.formats);
  return cfg;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw OutputError("cannot write " + path.string());
  os << content;
  os.flush();
  if (!os) throw OutputError("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw OutputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct ControllerRun {
  std::string descriptor;
  double R = 0.0;  // 0 unless LQR
  Gains gains;
  std::optional<DareSolution> dare;
};

std::vector<ControllerRun> design_controllers(const ScenarioConfig& cfg, const StepMatrices& M) {
  const ControllerConfig& c = cfg.controller;
  std::vector<ControllerRun> runs;
  switch (c.kind) {
    case ControllerKind::none:
      runs.push_back({"none", 0.0, open_loop_gains(M), std::nullopt});
      break;
    case ControllerKind::pole_place: {
      const auto& p = c.poles.values();
      runs.push_back({"pole-place(poles=" + f4(p[0]) + "," + f4(p[1]) + ")", 0.0, pole_place(M, c.poles), std::nullopt});
      break;
    }
    case ControllerKind::lqr:
      for (double R : c.R) {
        const LqrDesign d = design_lqr(M, LqrWeights(c.Q, R));
        std::ostringstream name;
        name << "lqr(R=" << format_double(R) << ")";
        runs.push_back({name.str(), R, d.gains, d.dare});
      }
      break;
  }
  return runs;
}

void print_poles(std::ostream& out, const Gains& g) {
  out << "  closed-loop eigenvalues = (" << f4(g.poles[0]) << ", " << f4(g.poles[1]) << ")\n";
  out << "  spectral radius = " << f4(g.spectral_radius()) << "\n";
}

int cmd_limit_cycle(const Invocation& inv, std::ostream& out) {
  const ScenarioConfig cfg = resolve(inv, true);
  const WalkerParams& p = cfg.walker;
  const GaitCycle cycle = design_cycle(p, cfg.L_c, cfg.T_c);
  const StepMatrices M = build_step_matrices(p, cycle.step_time);
  const auto ev = open_loop_eigenvalues(M);

  out << "Limit cycle\n";
  out << "  L_c = " << f4(cycle.step_length) << " m\n";
  out << "  T_c = " << f4(cycle.step_time) << " s\n";
  out << "  omega = " << f4(p.omega()) << " 1/s\n";
  out << "  x_c = (" << f4(cycle.fixed_point.x) << ", " << f4(cycle.fixed_point.xdot) << ")\n";
  out << "  open-loop eigenvalues = (" << f4(ev[0]) << ", " << f4(ev[1]) << ")\n";
  out << "  open-loop stable: " << (std::max(std::abs(ev[0]), std::abs(ev[1])) < 1.0 ? "yes" : "no") << "\n";

  if (!inv.out_dir.empty() && cfg.run.write_csv) {
    const fs::path dir = prepare_dir(cfg.run.output_dir);
    std::ostringstream csv;
    csv << "t,x_rel,xdot\n";
    const auto n = static_cast<int>(std::floor(cycle.step_time * cfg.run.sample_rate_hz + 1e-9));
    for (int k = 0; k <= n; ++k) {
      const double t = std::min(k / cfg.run.sample_rate_hz, cycle.step_time);
      const GaitState s = flow(p, cycle.fixed_point, t);
      csv << format_double(t) << ',' << format_double(s.x) << ',' << format_double(s.xdot) << '\n';
    }
    write_file(dir / "cycle.csv", csv.str());
  }
  return kExitOk;
}

nlohmann::json gains_json(const ControllerRun& run, ControllerKind kind) {
  nlohmann::json j;
  j["controller"] = std::string(to_string(kind));
  j["descriptor"] = run.descriptor;
  j["k1"] = run.gains.k1;
  j["k2"] = run.gains.k2;
  j["pole1_re"] = run.gains.poles[0].real();
  j["pole1_im"] = run.gains.poles[0].imag();
  j["pole2_re"] = run.gains.poles[1].real();
  j["pole2_im"] = run.gains.poles[1].imag();
  j["spectral_radius"] = run.gains.spectral_radius();
  if (run.dare) {
    j["R"] = run.R;
    j["dare_residual"] = run.dare->residual;
    j["dare_iterations"] = run.dare->iterations;
  }
  return j;
}

int cmd_design_gains(const Invocation& inv, std::ostream& out) {
  const ScenarioConfig cfg = resolve(inv, true);
  if (cfg.controller.kind == ControllerKind::none) {
    throw ConfigError("design-gains needs [controller].kind = \"pole-place\" or \"lqr\"");
  }
  const GaitCycle cycle = design_cycle(cfg.walker, cfg.L_c, cfg.T_c);
  const StepMatrices M = build_step_matrices(cfg.walker, cycle.step_time);
  const auto runs = design_controllers(cfg, M);

  const fs::path dir = prepare_dir(cfg.run.output_dir);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ControllerRun& r = runs[i];
    out << "Gains " << r.descriptor << "\n";
    out << "  k1 = " << f4(r.gains.k1) << "\n";
    out << "  k2 = " << f4(r.gains.k2) << "\n";
    print_poles(out, r.gains);
    if (r.dare) {
      std::ostringstream res;
      res << std::scientific << std::setprecision(3) << r.dare->residual;
      out << "  DARE residual = " << res.str() << "\n";
      out << "  DARE iterations = " << r.dare->iterations << "\n";
    }
    const std::string name = i == 0 ? "gains.json" : "gains_" + std::to_string(i + 1) + ".json";
    write_file(dir / name, gains_json(r, cfg.controller.kind).dump(2) + "\n");
  }
  return kExitOk;
}

int last_disturbed_step(const std::vector<Disturbance>& ds) {
  int last = 0;
  for (const Disturbance& d : ds) last = std::max(last, d.step_index);
  return last;
}

void print_convergence(std::ostream& out, std::span<const StepRecord> steps, int reference) {
  const auto settled = convergence_step(steps, reference, kConvergenceTolerance);
  if (settled) {
    out << "  steps to convergence = " << (*settled - reference) << " (||e_i|| < " << kConvergenceTolerance
        << " from step " << *settled << ")\n";
  } else {
    out << "  steps to convergence = not converged (||e_i|| >= " << kConvergenceTolerance << " at the last step)\n";
  }
}

int cmd_simulate(const Invocation& inv, std::ostream& out) {
  const ScenarioConfig cfg = resolve(inv, true);
  const GaitCycle cycle = design_cycle(cfg.walker, cfg.L_c, cfg.T_c);
  const StepMatrices M = build_step_matrices(cfg.walker, cycle.step_time);
  const auto runs = design_controllers(cfg, M);

  SimOptions opts;
  opts.n_steps = cfg.run.n_steps;
  opts.sample_rate_hz = cfg.run.sample_rate_hz;
  opts.push_model = cfg.run.push_model;

  const fs::path dir = prepare_dir(cfg.run.output_dir);
  const int reference = last_disturbed_step(cfg.disturbances);

  out << "Simulation: " << opts.n_steps << " steps, L_c = " << f4(cycle.step_length) << " m, T_c = "
      << f4(cycle.step_time) << " s\n";
  for (const Disturbance& d : cfg.disturbances) {
    out << "  push: step " << d.step_index << ", phase " << f4(d.phase) << ", F = " << f4(d.force) << " N for "
        << f4(d.duration) << " s\n";
  }

  std::vector<StepLengthRow> lengths;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ControllerRun& run = runs[i];
    const SimTrace trace = simulate(cfg.walker, cycle, run.gains, cfg.disturbances, opts, run.descriptor);

    double max_dev = 0.0;
    int clamped = 0;
    for (const StepRecord& r : trace.steps) {
      max_dev = std::max(max_dev, std::abs(r.L_applied - cycle.step_length));
      clamped += r.clamped ? 1 : 0;
      lengths.push_back({run.R, r.index, r.L_commanded, r.L_applied, r.clamped});
    }
    out << "Controller " << run.descriptor << "\n";
    out << "  k1 = " << f4(run.gains.k1) << ", k2 = " << f4(run.gains.k2) << "\n";
    out << "  max |L_i - L_c| = " << f4(max_dev) << " m, clamped steps = " << clamped << "\n";
    print_convergence(out, trace.steps, reference);

    if (i != 0) continue;
    // Figures are rendered from the parsed CSV text so that regenerating them
    // from the files on disk reproduces them exactly.
    std::ostringstream trace_csv, steps_csv;
    write_trace_csv(trace_csv, trace.samples);
    write_steps_csv(steps_csv, trace.steps);
    if (cfg.run.write_csv) {
      write_file(dir / "trace.csv", trace_csv.str());
      write_file(dir / "steps.csv", steps_csv.str());
    }
    if (cfg.run.write_svg) {
      std::istringstream trace_in(trace_csv.str()), steps_in(steps_csv.str());
      const auto samples = read_trace_csv(trace_in);
      const auto steps = read_steps_csv(steps_in);
      write_file(dir / "fig2_com.svg", render_com_figure(samples));
      write_file(dir / "fig3_phase.svg", render_phase_figure(steps, samples));
    }
  }

  if (runs.size() > 1) {
    std::ostringstream csv;
    write_step_length_csv(csv, lengths);
    if (cfg.run.write_csv) write_file(dir / "fig4_steplen.csv", csv.str());
    if (cfg.run.write_svg) {
      std::istringstream in(csv.str());
      write_file(dir / "fig4_steplen.svg", render_step_length_figure(read_step_length_csv(in)));
    }
  }
  out << "Output written to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_analyze(const Invocation& inv, std::ostream& out) {
  const ScenarioConfig cfg = resolve(inv, false);
  const fs::path dir(cfg.run.output_dir);

  std::istringstream trace_in(read_file(dir / "trace.csv"));
  std::istringstream steps_in(read_file(dir / "steps.csv"));
  const auto samples = read_trace_csv(trace_in);
  const auto steps = read_steps_csv(steps_in);

  out << "step  ||e_i||  ratio  L_applied\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::ostringstream ratio;
    if (i > 0 && steps[i - 1].error_norm > 0.0) {
      ratio << f4(steps[i].error_norm / steps[i - 1].error_norm);
    } else {
      ratio << "-";
    }
    std::ostringstream err;
    err << std::scientific << std::setprecision(3) << steps[i].error_norm;
    out << steps[i].index << "  " << err.str() << "  " << ratio.str() << "  " << f4(steps[i].L_applied) << "\n";
  }

  // The excursion that matters starts in the step before the first large error.
  int reference = 0;
  for (const StepRecord& r : steps) {
    if (r.error_norm >= kConvergenceTolerance) {
      reference = r.index - 1;
      break;
    }
  }
  if (reference > 0) out << "  first excursion originates in step " << reference << "\n";
  print_convergence(out, steps, reference);

  if (cfg.run.write_svg) {
    write_file(dir / "fig2_com.svg", render_com_figure(samples));
    write_file(dir / "fig3_phase.svg", render_phase_figure(steps, samples));
    if (fs::exists(dir / "fig4_steplen.csv")) {
      std::istringstream in(read_file(dir / "fig4_steplen.csv"));
      write_file(dir / "fig4_steplen.svg", render_step_length_figure(read_step_length_csv(in)));
    }
  }
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Limit-cycle walking on the linear inverted pendulum: cycle design, step-length stabilizers, push simulation"};
  app.name("lipwalk");
  app.require_subcommand(1);

  Invocation inv;
  auto add_common = [&inv](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "Scenario file");
    sub->add_option("--out", inv.out_dir, "Output directory (overrides [run].output_dir)");
    sub->add_option("--format", inv.formats, "Comma-separated output formats: csv,svg");
  };
  CLI::App* limit_cycle = app.add_subcommand("limit-cycle", "Fixed point and open-loop eigenvalues of the gait cycle");
  CLI::App* design_gains = app.add_subcommand("design-gains", "Pole-placement or LQR step-length gains");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Closed-loop push-recovery simulation");
  CLI::App* analyze = app.add_subcommand("analyze", "Error sequence and figures from an existing run directory");
  for (CLI::App* sub : {limit_cycle, design_gains, simulate_cmd, analyze}) add_common(sub);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (*limit_cycle) return cmd_limit_cycle(inv, out);
    if (*design_gains) return cmd_design_gains(inv, out);
    if (*simulate_cmd) return cmd_simulate(inv, out);
    return cmd_analyze(inv, out);
  } catch (const SolverFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {  // InvalidArgument, InvalidPoles
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {  // ConstraintViolation, Uncontrollable
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace lipwalk::cli
