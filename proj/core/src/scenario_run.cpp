#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <system_error>

#include "kappadyn/scenario_io.hpp"

namespace kappadyn {

namespace {

std::filesystem::path resolve_output_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv("KAPPADYN_OUTPUT_ROOT"); root && *root) {
      p = std::filesystem::path(root) / p;
    }
  }
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path.string());
  const std::size_t n = std::fwrite(text.data(), 1, text.size(), f);
  const bool ok = n == text.size() && std::fclose(f) == 0;
  if (!ok) throw IoError("write failed: " + path.string());
}

std::string format_series_csv(const TrajectoryRecord& rec) {
  std::string out = "t,norm,purity,integral,n_minus,n_plus,neg_area,x_mean,p_mean,x2_mean,"
                    "p2_mean,energy\n";
  char buf[64];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
    out += sep;
  };
  for (std::size_t i = 0; i < rec.samples(); ++i) {
    put(rec.times[i], ',');
    put(rec.norm[i], ',');
    put(rec.purity[i], ',');
    put(rec.integral[i], ',');
    put(rec.n_minus[i], ',');
    put(rec.n_plus[i], ',');
    put(rec.negative_area[i], ',');
    put(rec.x_mean[i], ',');
    put(rec.p_mean[i], ',');
    put(rec.x2_mean[i], ',');
    put(rec.p2_mean[i], ',');
    put(rec.energy[i], '\n');
  }
  return out;
}

void write_heatmap(const std::filesystem::path& path, const PhaseSpaceState& state,
                   const PhaseSpaceGrid& grid) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path.string());
  std::fprintf(f, "# t = %.17g\n", state.time);
  std::fprintf(f, "# x: %.17g %.17g %d\n", grid.x_min, grid.x_max, grid.nx);
  std::fprintf(f, "# p: %.17g %.17g %d\n", grid.p_min, grid.p_max, grid.np);
  for (int j = 0; j < grid.nx; ++j) {
    const cplx* row = &state.field[static_cast<std::size_t>(j) * grid.np];
    for (int k = 0; k < grid.np; ++k) {
      std::fprintf(f, "%.9g%c", row[k].real(), k + 1 < grid.np ? ' ' : '\n');
    }
  }
  const bool ok = std::ferror(f) == 0;
  if (std::fclose(f) != 0 || !ok) throw IoError("write failed: " + path.string());
}

std::string format_verdict(const EvolutionVerdict& v,
                           const std::vector<std::string>& warnings) {
  std::string out;
  char buf[96];
  out += "verdict: ";
  out += v.label == EvolutionVerdict::Label::MandatoryQuantum ? "MandatoryQuantum"
                                                              : "ClassicallyImplementable";
  out += '\n';
  const auto line = [&](const char* key, double val) {
    std::snprintf(buf, sizeof(buf), "%s: %.17g\n", key, val);
    out += buf;
  };
  line("drift_n_minus", v.drift_n_minus);
  line("drift_n_plus", v.drift_n_plus);
  line("drift_negative_area", v.drift_negative_area);
  line("tolerance", v.tolerance);
  line("floor", v.floor);
  std::snprintf(buf, sizeof(buf), "warnings: %zu\n", warnings.size());
  out += buf;
  for (const std::string& w : warnings) {
    out += "warning: ";
    out += w;
    out += '\n';
  }
  return out;
}

bool close_to(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

PhaseSpaceState initial_state(const ScenarioConfig& config, const PhaseSpaceGrid& grid) {
  if (const GaussianInit* g = std::get_if<GaussianInit>(&config.initial)) {
    return gaussian_state(g->x0, g->p0, g->sigma_x, config.params, grid, g->hermite_order);
  }
  const FileInit& f = std::get<FileInit>(config.initial);
  LoadedSnapshot loaded = read_snapshot(f.path);
  if (loaded.grid.nx != grid.nx || loaded.grid.np != grid.np ||
      !close_to(loaded.grid.x_min, grid.x_min) || !close_to(loaded.grid.x_max, grid.x_max) ||
      !close_to(loaded.grid.p_min, grid.p_min) || !close_to(loaded.grid.p_max, grid.p_max)) {
    throw ConfigError("snapshot grid does not match the configured grid: " + f.path);
  }
  if (!close_to(loaded.state.params.hbar, config.params.hbar) ||
      !close_to(loaded.state.params.mass, config.params.mass) ||
      !close_to(loaded.state.params.kappa, config.params.kappa)) {
    throw ConfigError("snapshot parameters do not match the configured parameters: " + f.path);
  }
  return std::move(loaded.state);
}

}  // namespace

RunArtifacts run_scenario(const ScenarioConfig& config) {
  config.params.validate();
  const PhaseSpaceGrid grid =
      build_grid(config.nx, config.np, config.x_min, config.x_max, config.p_min, config.p_max);

  PropagatorConfig prop = config.prop;
  prop.snapshot_stride = config.snapshot_every;
  prop.area_theta_rel = config.area_theta_rel;
  prop.validate();

  const PhaseSpaceState initial = initial_state(config, grid);
  PropagationResult result = propagate(initial, grid, config.potential, config.params, prop);

  RunArtifacts art;
  art.output_directory = resolve_output_dir(config.output_directory);
  std::error_code ec;
  std::filesystem::create_directories(art.output_directory, ec);
  if (ec) {
    throw IoError("cannot create output directory " + art.output_directory.string() + ": " +
                  ec.message());
  }

  art.series_csv = art.output_directory / "series.csv";
  write_text(art.series_csv, format_series_csv(result.record));

  char name[40];
  for (std::size_t i = 0; i < result.record.samples(); ++i) {
    const auto& snap = result.record.snapshots[i];
    if (!snap) continue;
    std::snprintf(name, sizeof(name), "snapshot_%06zu.wps", i);
    const std::filesystem::path sp = art.output_directory / name;
    write_snapshot(sp, *snap, grid);
    art.snapshots.push_back(sp);
    std::snprintf(name, sizeof(name), "heatmap_%06zu.txt", i);
    const std::filesystem::path hp = art.output_directory / name;
    write_heatmap(hp, *snap, grid);
    art.heatmaps.push_back(hp);
  }

  art.verdict = classify(result.record, config.classify_tolerance);
  art.verdict_txt = art.output_directory / "verdict.txt";
  write_text(art.verdict_txt, format_verdict(art.verdict, result.record.warnings));

  write_text(art.output_directory / "config.cfg", serialize_config(config));

  art.record = std::move(result.record);
  return art;
}

}  // namespace kappadyn
