#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kappadyn/analysis.hpp"

namespace kappadyn {

struct GaussianInit {
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma_x = 1.0;
  int hermite_order = 0;
};

struct FileInit {
  std::string path;
};

struct ScenarioConfig {
  int nx = 0, np = 0;
  double x_min = 0.0, x_max = 0.0, p_min = 0.0, p_max = 0.0;
  PhysicalParams params;
  Potential potential;
  std::variant<GaussianInit, FileInit> initial;
  PropagatorConfig prop;
  std::string output_directory = "out";
  long snapshot_every = 0;  // in records; 0 writes only the first and last
  double classify_tolerance = 0.05;
  double area_theta_rel = kDefaultAreaThetaRel;
};

struct ParseIssue {
  int line;  // 1-based; 0 when no line applies
  std::string key;
  std::string message;
};

struct ParseResult {
  std::optional<ScenarioConfig> config;  // set iff issues is empty
  std::vector<ParseIssue> issues;
};

// Sectioned key = value text. All violations are collected with line context
// rather than stopping at the first.
ParseResult parse_config(std::string_view text);

// Canonical re-serialization; parsing the output yields an equivalent config.
std::string serialize_config(const ScenarioConfig& config);

// Binary snapshot: 80-byte header (magic "WPS1", version u16, flags u16, nx u32,
// np u32, then x_min, x_max, p_min, p_max, hbar, kappa, mass, t as f64) followed
// by the row-major little-endian f64 payload. Flags: bit0 = complex payload
// (pairs), bit1 = unified representation. Round trips are bit-exact.
void write_snapshot(const std::filesystem::path& path, const PhaseSpaceState& state,
                    const PhaseSpaceGrid& grid);

struct LoadedSnapshot {
  PhaseSpaceState state;
  PhaseSpaceGrid grid;
};

LoadedSnapshot read_snapshot(const std::filesystem::path& path);

struct RunArtifacts {
  std::filesystem::path output_directory;
  std::filesystem::path series_csv;
  std::filesystem::path verdict_txt;
  std::vector<std::filesystem::path> snapshots;
  std::vector<std::filesystem::path> heatmaps;
  EvolutionVerdict verdict;
  TrajectoryRecord record;
};

// Runs the configured engine and writes series.csv, snapshot and heat-map
// files, and verdict.txt into the output directory. Relative output
// directories resolve under $KAPPADYN_OUTPUT_ROOT when that variable is set.
// All text output is locale-independent full-precision decimal, so identical
// configs produce byte-identical series.csv.
RunArtifacts run_scenario(const ScenarioConfig& config);

// Shipped scenario presets, embedded at build time.
std::string_view fig2_preset_text();
std::string_view harmonic_preset_text();

}  // namespace kappadyn
