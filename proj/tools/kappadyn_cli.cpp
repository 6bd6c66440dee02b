#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "kappadyn/scenario_io.hpp"

namespace {

using namespace kappadyn;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

ScenarioConfig parse_or_report(std::string_view text, const std::string& origin) {
  ParseResult parsed = parse_config(text);
  if (!parsed.config) {
    for (const ParseIssue& issue : parsed.issues) {
      if (issue.line > 0) {
        std::fprintf(stderr, "%s:%d: %s: %s\n", origin.c_str(), issue.line,
                     issue.key.c_str(), issue.message.c_str());
      } else {
        std::fprintf(stderr, "%s: %s: %s\n", origin.c_str(), issue.key.c_str(),
                     issue.message.c_str());
      }
    }
    throw ConfigError("invalid config: " + origin);
  }
  return *std::move(parsed.config);
}

int finish_run(const ScenarioConfig& config) {
  const RunArtifacts art = run_scenario(config);
  std::printf("wrote %s\n", art.output_directory.string().c_str());
  std::printf("verdict: %s\n",
              art.verdict.label == EvolutionVerdict::Label::MandatoryQuantum
                  ? "MandatoryQuantum"
                  : "ClassicallyImplementable");
  std::printf("samples: %zu, snapshots: %zu, warnings: %zu\n", art.record.samples(),
              art.snapshots.size(), art.record.warnings.size());
  for (const std::string& w : art.record.warnings) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  return 0;
}

int cmd_run(const std::string& path) {
  return finish_run(parse_or_report(read_file(path), path));
}

int cmd_fig2(const std::string& engine, std::optional<double> kappa,
             const std::string& out_dir) {
  ScenarioConfig config = parse_or_report(fig2_preset_text(), "<fig2 preset>");
  config.prop.engine = engine == "kvn" ? Engine::kvn : Engine::unified;
  if (kappa) config.params.kappa = *kappa;
  config.output_directory = out_dir.empty() ? "fig2-" + engine : out_dir;
  return finish_run(config);
}

int cmd_inspect(const std::string& path) {
  const LoadedSnapshot s = read_snapshot(path);
  std::printf("file: %s\n", path.c_str());
  std::printf("grid: %d x %d, x in [%.17g, %.17g], p in [%.17g, %.17g]\n", s.grid.nx,
              s.grid.np, s.grid.x_min, s.grid.x_max, s.grid.p_min, s.grid.p_max);
  std::printf("params: hbar = %.17g, mass = %.17g, kappa = %.17g\n", s.state.params.hbar,
              s.state.params.mass, s.state.params.kappa);
  std::printf("time: %.17g\n", s.state.time);
  std::printf("rep: %s\n", s.state.rep == Representation::unified ? "unified" : "wigner");
  const NormPurity np = norm_and_purity(s.state, s.grid);
  std::printf("norm: %.17g\npurity: %.17g\nintegral: %.17g\n", np.norm, np.purity,
              np.integral);
  const NegativityMetrics neg = negativity(s.state, s.grid);
  std::printf("n_minus: %.17g\nn_plus: %.17g\nnegative_area: %.17g (theta = %.3g)\n",
              neg.n_minus, neg.n_plus, neg.negative_area, neg.threshold);
  return 0;
}

int cmd_oracle_check(const std::string& path) {
  const ScenarioConfig config = parse_or_report(read_file(path), path);
  config.params.validate();
  const PhaseSpaceGrid grid =
      build_grid(config.nx, config.np, config.x_min, config.x_max, config.p_min, config.p_max);
  if (grid.size() > 1024) {
    throw ConfigError("oracle-check needs nx*np <= 1024 sites; got " +
                      std::to_string(grid.size()));
  }

  PhaseSpaceState initial;
  if (const GaussianInit* g = std::get_if<GaussianInit>(&config.initial)) {
    initial = gaussian_state(g->x0, g->p0, g->sigma_x, config.params, grid, g->hermite_order);
  } else {
    initial = read_snapshot(std::get<FileInit>(config.initial).path).state;
    if (initial.field.size() != grid.size()) {
      throw ConfigError("snapshot grid does not match the configured grid");
    }
  }

  PropagatorConfig prop = config.prop;
  prop.record_every = prop.n_steps;  // endpoints only
  prop.snapshot_stride = 0;
  const PropagationResult split = propagate(initial, grid, config.potential, config.params, prop);
  const double t = prop.dt * static_cast<double>(prop.n_steps);
  const PhaseSpaceState exact =
      dense_oracle(initial, grid, config.potential, config.params, prop.engine, t);

  double linf = 0.0, l2 = 0.0, fmax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::abs(split.final_state.field[i] - exact.field[i]);
    linf = std::max(linf, d);
    l2 += d * d;
    fmax = std::max(fmax, std::abs(exact.field[i]));
  }
  l2 = std::sqrt(l2 * grid.dx * grid.dp);

  std::printf("sites: %zu (%d x %d)\n", grid.size(), grid.nx, grid.np);
  std::printf("t: %.17g (dt = %.17g, %ld steps)\n", t, prop.dt, prop.n_steps);
  std::printf("L_inf: %.6g (relative %.6g)\n", linf, fmax > 0.0 ? linf / fmax : 0.0);
  std::printf("L_2: %.6g\n", l2);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kappa-interpolated phase-space dynamics"};
  app.require_subcommand(1);

  std::string config_path, snapshot_path, engine, out_dir;
  double kappa = 1.0;

  CLI::App* run = app.add_subcommand("run", "run a scenario config file");
  run->add_option("config", config_path, "scenario config path")->required();

  CLI::App* fig2 = app.add_subcommand("fig2", "run the shipped Morse benchmark preset");
  fig2->add_option("--engine", engine, "propagation engine")
      ->required()
      ->check(CLI::IsMember({"kvn", "unified"}));
  CLI::Option* kappa_opt =
      fig2->add_option("--kappa", kappa, "override kappa")->check(CLI::Range(0.0, 1.0));
  fig2->add_option("--out", out_dir, "output directory (default fig2-<engine>)");

  CLI::App* inspect = app.add_subcommand("inspect", "print snapshot header and metrics");
  inspect->add_option("snapshot", snapshot_path, "snapshot path")->required();

  CLI::App* oracle =
      app.add_subcommand("oracle-check", "compare the splitting against the dense generator");
  oracle->add_option("config", config_path, "scenario config path (small grid)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse diagnostic
    return code == 0 ? 0 : 1;     // usage mistakes are config errors
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (fig2->parsed()) {
      return cmd_fig2(engine,
                      kappa_opt->count() ? std::optional<double>(kappa) : std::nullopt,
                      out_dir);
    }
    if (inspect->parsed()) return cmd_inspect(snapshot_path);
    if (oracle->parsed()) return cmd_oracle_check(config_path);
  } catch (const kappadyn::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const kappadyn::NumericsError& e) {
    std::fprintf(stderr, "numerics error: %s\n", e.what());
    return 2;
  } catch (const kappadyn::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  }
  return 0;
}
