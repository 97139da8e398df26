// kdvlab: periodic pseudospectral laboratory for filtered low-regularity
// KdV time integrators.  Declarative configs in, deterministic CSV/JSON/SVG
// artifacts out.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kdvlab/kdvlab.hpp"

namespace fs = std::filesystem;
using namespace kdvlab;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 0;  // 0: take [run] jobs from config, default 1
  long long seed_override = -1;
  bool check = false;
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "experiment config file (TOML subset)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory for artifacts");
  cmd->add_option("--jobs", args.jobs, "worker threads (overrides [run] jobs)");
  cmd->add_option("--seed-override", args.seed_override, "replace configured seeds with one seed");
  cmd->add_flag("--check", args.check, "validate config and exit without running");
  cmd->add_flag("--plot", args.plot, "also emit an SVG rate plot");
}

ConfigDoc load_doc(const CommonArgs& args) { return parse_config(read_text_file(args.config_path)); }

ExperimentConfig load_experiment(const CommonArgs& args) {
  ExperimentConfig cfg = experiment_config_from(load_doc(args));
  if (args.jobs > 0) cfg.jobs = args.jobs;
  if (args.seed_override >= 0) cfg.seeds = {static_cast<uint64_t>(args.seed_override)};
  return cfg;
}

ProbeConfig load_probe(const CommonArgs& args) {
  ProbeConfig cfg = probe_config_from(load_doc(args));
  if (args.jobs > 0) cfg.jobs = args.jobs;
  if (args.seed_override >= 0) cfg.seed0 = static_cast<uint64_t>(args.seed_override);
  return cfg;
}

void ensure_out_dir(const CommonArgs& args) {
  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + args.out_dir);
}

void write_error_record(const CommonArgs& args, const std::string& kind, const std::string& msg,
                        int code) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = msg;
  j["exit_code"] = code;
  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (!ec) {
    try {
      write_text_file(fs::path(args.out_dir) / "error.json", j.dump(2) + "\n");
    } catch (const IoError&) {
      // stderr already has the message; nothing more we can do
    }
  }
}

// Single scheme/tau/seed slice of an experiment config, for step/evolve.
struct SingleRun {
  ExperimentConfig cfg;
  SchemeKind scheme;
  double tau;
  uint64_t seed;
};

SingleRun single_run_from(const ExperimentConfig& cfg) {
  if (cfg.schemes.empty()) throw ConfigError("config: schemes.names must not be empty");
  return {cfg, cfg.schemes.front(), cfg.tau_ladder.front(), cfg.seeds.front()};
}

int cmd_step(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment(args);
  validate_grid(cfg.grid);
  SingleRun run = single_run_from(cfg);
  if (args.check) return 0;
  ensure_out_dir(args);
  SpectralField u0 = make_initial_datum(cfg, run.seed);
  StepContext ctx = make_step_context(cfg.grid, run.tau);
  SchemeSpec spec{run.scheme, PsiChoice::Resonance, 64};
  SpectralField u1 = step(ctx, spec, u0);
  write_snapshot(fs::path(args.out_dir) / "u0.kdvs", u0, run.tau);
  write_snapshot(fs::path(args.out_dir) / "u1.kdvs", u1, run.tau);
  write_text_file(fs::path(args.out_dir) / "u1.csv", field_csv(u1));
  return 0;
}

int cmd_evolve(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment(args);
  validate_grid(cfg.grid);
  SingleRun run = single_run_from(cfg);
  int n_steps = steps_for(cfg.horizon, run.tau);
  if (args.check) return 0;
  ensure_out_dir(args);
  SpectralField u0 = make_initial_datum(cfg, run.seed);
  StepContext ctx = make_step_context(cfg.grid, run.tau);
  SchemeSpec spec{run.scheme, PsiChoice::Resonance, 64};
  int stride = std::max(1, n_steps / 128);
  std::vector<std::pair<double, double>> norms;  // (t, L2)
  norms.emplace_back(0.0, l2_norm(u0));
  std::vector<StepObserver> obs{[&](int n, const SpectralField& u) {
    if (n % stride == 0 || n == n_steps) norms.emplace_back(n * run.tau, l2_norm(u));
  }};
  SpectralField uN = evolve(ctx, spec, u0, n_steps, obs);
  write_snapshot(fs::path(args.out_dir) / "final.kdvs", uN, run.tau);
  write_text_file(fs::path(args.out_dir) / "final.csv", field_csv(uN));
  nlohmann::ordered_json j;
  j["study"] = "evolve";
  j["scheme"] = scheme_name(run.scheme);
  j["tau"] = run.tau;
  j["seed"] = run.seed;
  j["n_steps"] = n_steps;
  j["n_modes"] = cfg.grid.n_modes;
  nlohmann::ordered_json traj = nlohmann::ordered_json::array();
  for (auto [t, l2] : norms) traj.push_back({{"t", t}, {"l2", l2}});
  j["l2_trajectory"] = traj;
  write_text_file(fs::path(args.out_dir) / "evolve.json", j.dump(2) + "\n");
  return 0;
}

int cmd_converge(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment(args);
  validate_experiment_config(cfg, true);
  if (args.check) return 0;
  ConvergenceReport report = convergence_study(cfg);
  bool any_ok = false;
  for (const ErrorPoint& p : report.points) any_ok = any_ok || !p.blew_up;
  if (!any_ok) throw BlowUpError("all convergence points lost to blow-up", 0);
  ensure_out_dir(args);
  write_text_file(fs::path(args.out_dir) / "convergence.csv", convergence_csv(report));
  write_text_file(fs::path(args.out_dir) / "convergence.json",
                  convergence_sidecar(report).dump(2) + "\n");
  if (args.plot) {
    std::vector<PlotSeries> series;
    for (SchemeKind scheme : cfg.schemes) {
      PlotSeries s;
      s.name = scheme_name(scheme);
      for (double tau : cfg.tau_ladder) {
        std::vector<double> errs;
        for (const ErrorPoint& p : report.points)
          if (p.scheme == scheme && p.tau == tau && !p.blew_up && p.error_l2 > 0.0)
            errs.push_back(p.error_l2);
        if (!errs.empty()) s.points.emplace_back(tau, median(errs));
      }
      series.push_back(s);
    }
    write_text_file(fs::path(args.out_dir) / "convergence.svg",
                    svg_rate_plot("endpoint L2 error vs tau", series, {1.0, cfg.s0 / 3.0}));
  }
  return 0;
}

int cmd_projection_gap(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment(args);
  validate_experiment_config(cfg, true);
  if (args.check) return 0;
  GapReport report = projection_gap_study(cfg);
  bool any_ok = false;
  for (const GapPoint& p : report.points) any_ok = any_ok || !p.blew_up;
  if (!any_ok) throw BlowUpError("all projection-gap points lost to blow-up", 0);
  ensure_out_dir(args);
  write_text_file(fs::path(args.out_dir) / "projection_gap.csv", gap_csv(report));
  write_text_file(fs::path(args.out_dir) / "projection_gap.json",
                  gap_sidecar(report).dump(2) + "\n");
  if (args.plot) {
    std::vector<PlotSeries> series;
    for (uint64_t seed : cfg.seeds) {
      PlotSeries s;
      s.name = "seed " + std::to_string(seed);
      for (const GapPoint& p : report.points)
        if (p.seed == seed && !p.blew_up && p.gap > 0.0) s.points.emplace_back(p.tau, p.gap);
      series.push_back(s);
    }
    write_text_file(fs::path(args.out_dir) / "projection_gap.svg",
                    svg_rate_plot("sup_t L2 projection gap vs tau", series, {cfg.s0 / 3.0}));
  }
  return 0;
}

int cmd_local_error(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment(args);
  validate_experiment_config(cfg, false);
  if (args.check) return 0;
  LocalErrorReport report = local_error_study(cfg);
  ensure_out_dir(args);
  write_text_file(fs::path(args.out_dir) / "local_error.csv", local_error_csv(report));
  write_text_file(fs::path(args.out_dir) / "local_error.json",
                  local_error_sidecar(report).dump(2) + "\n");
  if (args.plot) {
    std::vector<PlotSeries> series;
    for (SchemeKind scheme : cfg.schemes) {
      PlotSeries s;
      s.name = scheme_name(scheme);
      for (const LocalErrorPoint& p : report.points)
        if (p.scheme == scheme && p.defect > 0.0) s.points.emplace_back(p.tau, p.defect);
      series.push_back(s);
    }
    write_text_file(fs::path(args.out_dir) / "local_error.svg",
                    svg_rate_plot("one-step defect vs tau", series, {2.0}));
  }
  return 0;
}

int cmd_bourgain_probe(const CommonArgs& args) {
  ProbeConfig cfg = load_probe(args);
  validate_probe_config(cfg);
  if (args.check) return 0;
  ProbeReport report = probe_study(cfg);
  ensure_out_dir(args);
  write_text_file(fs::path(args.out_dir) / "probes.csv", probe_csv(report));
  write_text_file(fs::path(args.out_dir) / "probes.json", probe_sidecar(report).dump(2) + "\n");
  return 0;
}

int cmd_gen_data(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment(args);
  validate_grid(cfg.grid);
  if (args.check) return 0;
  ensure_out_dir(args);
  SpectralField u0 = make_initial_datum(cfg, cfg.seeds.front());
  double tau = cfg.tau_ladder.front();
  write_snapshot(fs::path(args.out_dir) / "data.kdvs", u0, tau);
  write_text_file(fs::path(args.out_dir) / "data.csv", field_csv(u0));
  nlohmann::ordered_json j;
  j["study"] = "gen-data";
  j["data"] = data_kind_name(cfg.data);
  j["seed"] = cfg.seeds.front();
  j["n_modes"] = cfg.grid.n_modes;
  j["l2_norm"] = l2_norm(u0);
  nlohmann::ordered_json reg = nlohmann::ordered_json::array();
  for (auto [s, norm] : empirical_regularity(u0, {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}))
    reg.push_back({{"s", s}, {"h_norm", norm}});
  j["empirical_regularity"] = reg;
  write_text_file(fs::path(args.out_dir) / "gen_data.json", j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic pseudospectral laboratory for filtered KdV time integrators"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* desc;
    int (*fn)(const CommonArgs&);
  };
  const std::vector<Sub> subs{
      {"step", "apply one step of the configured scheme and write snapshots", cmd_step},
      {"evolve", "run one scheme to the horizon and write the endpoint", cmd_evolve},
      {"converge", "error ladder against a validated fine reference", cmd_converge},
      {"projection-gap", "filtered-vs-unfiltered flow gap across the tau ladder",
       cmd_projection_gap},
      {"local-error", "one-step defect ladder against a fine projected solve", cmd_local_error},
      {"bourgain-probe", "discrete Strichartz/bilinear constant probes", cmd_bourgain_probe},
      {"gen-data", "synthesize an initial datum and write snapshot + regularity table",
       cmd_gen_data},
  };

  std::vector<CommonArgs> args(subs.size());
  std::vector<CLI::App*> cmds;
  for (size_t i = 0; i < subs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].desc);
    add_common(cmd, args[i]);
    cmds.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (size_t i = 0; i < subs.size(); ++i) {
    if (!cmds[i]->parsed()) continue;
    try {
      return subs[i].fn(args[i]);
    } catch (const ConfigError& e) {
      write_error_record(args[i], "config", e.what(), 2);
      return 2;
    } catch (const std::invalid_argument& e) {
      write_error_record(args[i], "config", e.what(), 2);
      return 2;
    } catch (const BlowUpError& e) {
      write_error_record(args[i], "blowup", e.what(), 3);
      return 3;
    } catch (const ReferenceValidationError& e) {
      write_error_record(args[i], "reference", e.what(), 3);
      return 3;
    } catch (const IoError& e) {
      write_error_record(args[i], "io", e.what(), 4);
      return 4;
    } catch (const std::exception& e) {
      write_error_record(args[i], "internal", e.what(), 1);
      return 1;
    }
  }
  return 2;
}
