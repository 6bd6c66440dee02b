#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kappadyn/scenario_io.hpp"
#include "test_util.hpp"

using namespace kappadyn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::vector<double>> read_csv_columns(const fs::path& p, std::string* header) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::string tok = line.substr(start, comma == std::string::npos
                                                     ? std::string::npos
                                                     : comma - start);
      row.push_back(std::strtod(tok.c_str(), nullptr));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_cli(const std::string& args, const fs::path& out, const fs::path& err) {
  const std::string cmd =
      std::string(KAPPADYN_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

// 64 x 64 keeps the run cases spectrally resolved; parse cases only read text.
const char* kMinimalDoc =
    "[grid]\n"
    "nx = 64\n"
    "np = 64\n"
    "x_min = -6\n"
    "x_max = 6\n"
    "p_min = -6\n"
    "p_max = 6\n"
    "[params]\n"
    "kappa = 1\n"
    "[potential]\n"
    "family = harmonic\n"
    "m = 1\n"
    "omega = 1\n"
    "[state]\n"
    "type = gaussian\n"
    "sigma_x = 0.7071067811865476\n"
    "[propagation]\n"
    "engine = unified\n"
    "dt = 0.01\n"
    "n_steps = 20\n"
    "record_every = 10\n";

std::string with_line_replaced(std::string text, const std::string& from,
                               const std::string& to) {
  const std::size_t at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("an empty document lists every required key") {
  const ParseResult r = parse_config("");
  CHECK_FALSE(r.config.has_value());
  std::set<std::string> keys;
  for (const ParseIssue& i : r.issues) {
    keys.insert(i.key);
    CHECK(i.message == "required key is missing");
  }
  for (const char* k : {"grid.nx", "grid.np", "grid.x_min", "params.kappa",
                        "potential.family", "state.type", "propagation.engine",
                        "propagation.dt", "propagation.n_steps"}) {
    CAPTURE(k);
    CHECK(keys.count(k) == 1);
  }
}

TEST_CASE("kappa outside the unit interval is rejected with line context") {
  const std::string doc = with_line_replaced(kMinimalDoc, "kappa = 1\n", "kappa = 1.5\n");
  const ParseResult r = parse_config(doc);
  CHECK_FALSE(r.config.has_value());
  REQUIRE(r.issues.size() == 1);
  CHECK(r.issues[0].message == "kappa must lie in [0,1]");
  CHECK(r.issues[0].key == "params.kappa");
  CHECK(r.issues[0].line == 9);
}

TEST_CASE("structural problems are reported with their lines") {
  const ParseResult unknown_key =
      parse_config(with_line_replaced(kMinimalDoc, "nx = 64\n", "nx = 64\nwobble = 3\n"));
  CHECK_FALSE(unknown_key.config.has_value());
  REQUIRE(unknown_key.issues.size() == 1);
  CHECK(unknown_key.issues[0].message == "unknown key");
  CHECK(unknown_key.issues[0].line == 3);

  const ParseResult dup =
      parse_config(with_line_replaced(kMinimalDoc, "np = 64\n", "np = 64\nnp = 32\n"));
  REQUIRE(dup.issues.size() == 1);
  CHECK(dup.issues[0].message == "duplicate key");

  const ParseResult badnum =
      parse_config(with_line_replaced(kMinimalDoc, "dt = 0.01\n", "dt = fast\n"));
  REQUIRE(badnum.issues.size() >= 1);
  CHECK(badnum.issues[0].key == "propagation.dt");
  CHECK(badnum.issues[0].message.find("not a finite number") == 0);

  const ParseResult badsec = parse_config(std::string("[warp]\nspeed = 9\n") + kMinimalDoc);
  REQUIRE(badsec.issues.size() == 1);
  CHECK(badsec.issues[0].message == "unknown section");
  CHECK(badsec.issues[0].line == 1);

  const ParseResult stray = parse_config(std::string("loose = 1\n") + kMinimalDoc);
  REQUIRE(stray.issues.size() == 1);
  CHECK(stray.issues[0].message == "key outside any section");

  const ParseResult nodiv = parse_config(
      with_line_replaced(kMinimalDoc, "record_every = 10\n", "record_every = 7\n"));
  REQUIRE(nodiv.issues.size() == 1);
  CHECK(nodiv.issues[0].message.find("divide") != std::string::npos);

  const ParseResult badengine =
      parse_config(with_line_replaced(kMinimalDoc, "engine = unified\n", "engine = warp\n"));
  REQUIRE(badengine.issues.size() == 1);
  CHECK(badengine.issues[0].message == "unknown engine 'warp'");
}

TEST_CASE("comments and spacing are tolerated") {
  const std::string doc = std::string("# leading comment\n; alt comment\n") + kMinimalDoc;
  const ParseResult r = parse_config(doc);
  CHECK(r.issues.empty());
  REQUIRE(r.config.has_value());
  CHECK(r.config->nx == 64);
  CHECK(r.config->prop.n_steps == 20);
}

TEST_CASE("the shipped presets parse and round-trip through serialization") {
  for (std::string_view text : {fig2_preset_text(), harmonic_preset_text()}) {
    const ParseResult first = parse_config(text);
    for (const ParseIssue& i : first.issues) {
      CAPTURE(i.key);
      CAPTURE(i.message);
      CHECK(false);
    }
    REQUIRE(first.config.has_value());

    const std::string canon = serialize_config(*first.config);
    const ParseResult second = parse_config(canon);
    REQUIRE(second.config.has_value());
    CHECK(serialize_config(*second.config) == canon);  // canonical form is a fixed point

    const ScenarioConfig& a = *first.config;
    const ScenarioConfig& b = *second.config;
    CHECK(a.nx == b.nx);
    CHECK(a.np == b.np);
    CHECK(a.x_min == b.x_min);
    CHECK(a.x_max == b.x_max);
    CHECK(a.p_min == b.p_min);
    CHECK(a.p_max == b.p_max);
    CHECK(a.params.hbar == b.params.hbar);
    CHECK(a.params.mass == b.params.mass);
    CHECK(a.params.kappa == b.params.kappa);
    CHECK(a.potential.family == b.potential.family);
    CHECK(a.prop.dt == b.prop.dt);
    CHECK(a.prop.n_steps == b.prop.n_steps);
    CHECK(a.prop.record_every == b.prop.record_every);
    CHECK(a.prop.engine == b.prop.engine);
    CHECK(a.prop.snapshot_stride == b.prop.snapshot_stride);
    CHECK(a.prop.area_theta_rel == b.prop.area_theta_rel);
    CHECK(a.output_directory == b.output_directory);
    CHECK(a.classify_tolerance == b.classify_tolerance);
    REQUIRE(std::holds_alternative<GaussianInit>(a.initial));
    REQUIRE(std::holds_alternative<GaussianInit>(b.initial));
    const GaussianInit& ga = std::get<GaussianInit>(a.initial);
    const GaussianInit& gb = std::get<GaussianInit>(b.initial);
    CHECK(ga.x0 == gb.x0);
    CHECK(ga.p0 == gb.p0);
    CHECK(ga.sigma_x == gb.sigma_x);
    CHECK(ga.hermite_order == gb.hermite_order);
  }
}

TEST_CASE("the fig2 preset carries the Morse scenario") {
  const ParseResult r = parse_config(fig2_preset_text());
  REQUIRE(r.config.has_value());
  CHECK(r.config->potential.family == Potential::Family::morse);
  CHECK(r.config->params.kappa == 1.0);
  CHECK(r.config->prop.engine == Engine::unified);
  CHECK(std::get<GaussianInit>(r.config->initial).hermite_order == 1);
  CHECK(r.config->prop.dt * static_cast<double>(r.config->prop.n_steps) ==
        doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("snapshots round trip bit for bit") {
  const fs::path dir = testutil::scratch_dir("snapshot-roundtrip");
  const PhaseSpaceGrid g = build_grid(16, 8, -2.0, 2.0, -3.0, 3.0);

  PhaseSpaceState s;
  s.params = testutil::params_of(1.0, 2.0, 0.75);
  s.rep = Representation::unified;
  s.time = 12.25;
  s.field.resize(g.size());
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (cplx& v : s.field) v = cplx{u(rng), u(rng)};

  const fs::path file = dir / "state.wps";
  write_snapshot(file, s, g);
  CHECK(fs::file_size(file) == 80 + g.size() * 16);  // complex payload

  const LoadedSnapshot back = read_snapshot(file);
  CHECK(back.grid.nx == 16);
  CHECK(back.grid.np == 8);
  CHECK(back.grid.x_min == -2.0);
  CHECK(back.grid.p_max == 3.0);
  CHECK(back.state.params.hbar == s.params.hbar);
  CHECK(back.state.params.mass == s.params.mass);
  CHECK(back.state.params.kappa == s.params.kappa);
  CHECK(back.state.time == s.time);
  CHECK(back.state.rep == Representation::unified);
  REQUIRE(back.state.field.size() == s.field.size());
  for (std::size_t i = 0; i < s.field.size(); ++i) CHECK(back.state.field[i] == s.field[i]);

  // Purely real fields use the compact payload and reload identically.
  PhaseSpaceState real_state = s;
  real_state.rep = Representation::wigner;
  for (cplx& v : real_state.field) v = cplx{v.real(), 0.0};
  const fs::path rfile = dir / "real.wps";
  write_snapshot(rfile, real_state, g);
  CHECK(fs::file_size(rfile) == 80 + g.size() * 8);
  const LoadedSnapshot rback = read_snapshot(rfile);
  CHECK(rback.state.rep == Representation::wigner);
  for (std::size_t i = 0; i < real_state.field.size(); ++i)
    CHECK(rback.state.field[i] == real_state.field[i]);
}

TEST_CASE("the snapshot reader rejects corrupt files") {
  const fs::path dir = testutil::scratch_dir("snapshot-corrupt");
  const PhaseSpaceGrid g = build_grid(16, 8, -2.0, 2.0, -3.0, 3.0);
  PhaseSpaceState s;
  s.params = testutil::params_of(1.0, 1.0, 1.0);
  s.field.assign(g.size(), cplx{0.5, 0.0});
  const fs::path file = dir / "ok.wps";
  write_snapshot(file, s, g);
  const std::string bytes = slurp(file);

  CHECK_THROWS_AS(read_snapshot(dir / "missing.wps"), IoError);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  spit(dir / "magic.wps", bad_magic);
  CHECK_THROWS_AS(read_snapshot(dir / "magic.wps"), IoError);

  std::string bad_version = bytes;
  bad_version[4] = 9;
  spit(dir / "version.wps", bad_version);
  CHECK_THROWS_AS(read_snapshot(dir / "version.wps"), IoError);

  spit(dir / "short.wps", bytes.substr(0, bytes.size() - 8));
  try {
    read_snapshot(dir / "short.wps");
    CHECK(false);
  } catch (const IoError& e) {
    const std::string what = e.what();
    CHECK(what.find("expected") != std::string::npos);
    CHECK(what.find("bytes") != std::string::npos);
  }

  spit(dir / "long.wps", bytes + "!");
  CHECK_THROWS_AS(read_snapshot(dir / "long.wps"), IoError);

  // A header whose physical parameters violate their invariants is an I/O
  // error at this boundary, not a config error.
  std::string bad_kappa = bytes;
  const double two = 2.0;
  std::memcpy(bad_kappa.data() + 16 + 5 * 8, &two, 8);  // kappa field
  spit(dir / "kappa.wps", bad_kappa);
  CHECK_THROWS_AS(read_snapshot(dir / "kappa.wps"), IoError);
}

TEST_CASE("scenario runs write a complete artifact bundle") {
  const fs::path dir = testutil::scratch_dir("run-bundle");
  const ParseResult r = parse_config(harmonic_preset_text());
  REQUIRE(r.config.has_value());

  ScenarioConfig cfg = *r.config;
  cfg.output_directory = (dir / "a").string();
  const RunArtifacts a = run_scenario(cfg);

  CHECK(fs::exists(a.series_csv));
  CHECK(fs::exists(a.verdict_txt));
  CHECK(a.verdict.label == EvolutionVerdict::Label::ClassicallyImplementable);
  REQUIRE(!a.snapshots.empty());
  CHECK(a.snapshots.size() == a.record.samples());  // snapshot_every = 1 keeps all
  CHECK(a.heatmaps.size() == a.snapshots.size());
  for (const fs::path& p : a.snapshots) CHECK(fs::exists(p));

  std::string header;
  const auto rows = read_csv_columns(a.series_csv, &header);
  CHECK(header == "t,norm,purity,integral,n_minus,n_plus,neg_area,x_mean,p_mean,x2_mean,"
                  "p2_mean,energy");
  REQUIRE(rows.size() == a.record.samples());
  for (const auto& row : rows) CHECK(row.size() == 12);
  CHECK(rows[0][0] == 0.0);

  const std::string verdict_text = slurp(a.verdict_txt);
  CHECK(verdict_text.find("ClassicallyImplementable") != std::string::npos);
  CHECK(verdict_text.find("drift") != std::string::npos);

  // Heat maps carry three comment lines and an nx-by-np matrix.
  std::ifstream hm(a.heatmaps.front());
  std::string line;
  int comments = 0, data_rows = 0, first_row_tokens = 0;
  while (std::getline(hm, line)) {
    if (!line.empty() && line[0] == '#') {
      ++comments;
      continue;
    }
    if (line.empty()) continue;
    ++data_rows;
    if (data_rows == 1) {
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) ++first_row_tokens;
    }
  }
  CHECK(comments == 3);
  CHECK(data_rows == 128);
  CHECK(first_row_tokens == 128);

  // Reloading the first snapshot reproduces the recorded t = 0 metrics.
  const LoadedSnapshot snap = read_snapshot(a.snapshots.front());
  const NegativityMetrics m = negativity(snap.state, snap.grid, cfg.prop.area_theta_rel);
  CHECK(m.n_minus == a.record.n_minus.front());
  CHECK(norm_and_purity(snap.state, snap.grid).norm == a.record.norm.front());
}

TEST_CASE("identical configs produce byte-identical series") {
  const fs::path dir = testutil::scratch_dir("run-determinism");
  const ParseResult r = parse_config(harmonic_preset_text());
  REQUIRE(r.config.has_value());

  ScenarioConfig cfg = *r.config;
  cfg.prop.snapshot_stride = 0;  // keep the bundle light
  cfg.snapshot_every = 0;
  cfg.output_directory = (dir / "a").string();
  const RunArtifacts a = run_scenario(cfg);
  cfg.output_directory = (dir / "b").string();
  const RunArtifacts b = run_scenario(cfg);

  CHECK(slurp(a.series_csv) == slurp(b.series_csv));
}

TEST_CASE("both engines agree on the harmonic preset series") {
  const fs::path dir = testutil::scratch_dir("run-engines");
  const ParseResult r = parse_config(harmonic_preset_text());
  REQUIRE(r.config.has_value());

  ScenarioConfig cfg = *r.config;
  cfg.prop.snapshot_stride = 0;
  cfg.snapshot_every = 0;
  cfg.output_directory = (dir / "unified").string();
  REQUIRE(cfg.prop.engine == Engine::unified);
  const RunArtifacts a = run_scenario(cfg);

  cfg.prop.engine = Engine::kvn;
  cfg.output_directory = (dir / "kvn").string();
  const RunArtifacts b = run_scenario(cfg);

  const auto ra = read_csv_columns(a.series_csv, nullptr);
  const auto rb = read_csv_columns(b.series_csv, nullptr);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    for (std::size_t c = 0; c < ra[i].size(); ++c) {
      CAPTURE(i);
      CAPTURE(c);
      CHECK(std::abs(ra[i][c] - rb[i][c]) < 1e-9);
    }
  }
}

TEST_CASE("relative output directories resolve under the output root") {
  const fs::path dir = testutil::scratch_dir("run-envroot");
  REQUIRE(setenv("KAPPADYN_OUTPUT_ROOT", dir.c_str(), 1) == 0);

  ParseResult r = parse_config(kMinimalDoc);
  REQUIRE(r.config.has_value());
  ScenarioConfig cfg = *r.config;
  cfg.output_directory = "nested/run";
  const RunArtifacts a = run_scenario(cfg);
  REQUIRE(unsetenv("KAPPADYN_OUTPUT_ROOT") == 0);

  CHECK(a.output_directory == dir / "nested/run");
  CHECK(fs::exists(dir / "nested/run/series.csv"));
}

TEST_CASE("file-backed initial states must match the configured lattice") {
  const fs::path dir = testutil::scratch_dir("run-fileinit");
  const PhaseSpaceGrid g = build_grid(64, 64, -6.0, 6.0, -6.0, 6.0);
  const PhysicalParams qp = testutil::params_of(1.0, 1.0, 1.0);
  const PhaseSpaceState s = gaussian_state(0.0, 0.0, std::sqrt(0.5), qp, g, 0);
  const fs::path snap = dir / "init.wps";
  write_snapshot(snap, s, g);

  ParseResult r = parse_config(kMinimalDoc);
  REQUIRE(r.config.has_value());
  ScenarioConfig cfg = *r.config;
  cfg.initial = FileInit{snap.string()};
  cfg.output_directory = (dir / "out").string();
  const RunArtifacts a = run_scenario(cfg);
  CHECK(a.record.norm.front() == doctest::Approx(1.0).epsilon(1e-6));

  ScenarioConfig mismatched = cfg;
  mismatched.nx = 32;
  mismatched.np = 32;
  mismatched.output_directory = (dir / "bad").string();
  CHECK_THROWS_AS(run_scenario(mismatched), ConfigError);
}

TEST_CASE("cli maps error domains onto exit codes") {
  const fs::path dir = testutil::scratch_dir("cli");
  const fs::path out = dir / "out.txt", err = dir / "err.txt";

  CHECK(run_cli("", out, err) == 1);                       // missing subcommand
  CHECK(run_cli("fig2 --engine warp", out, err) == 1);     // bad enum value
  CHECK(run_cli("run " + (dir / "absent.cfg").string(), out, err) == 3);
  CHECK(run_cli("inspect " + (dir / "absent.wps").string(), out, err) == 3);

  const fs::path bad = dir / "bad.cfg";
  spit(bad, with_line_replaced(kMinimalDoc, "kappa = 1\n", "kappa = 1.5\n"));
  CHECK(run_cli("run " + bad.string(), out, err) == 1);
  CHECK(slurp(err).find("kappa must lie in [0,1]") != std::string::npos);

  // A healthy tiny scenario runs to completion.
  const fs::path okcfg = dir / "ok.cfg";
  spit(okcfg, std::string(kMinimalDoc) + "[output]\ndirectory = " +
                  (dir / "cli-run").string() + "\n");
  CHECK(run_cli("run " + okcfg.string(), out, err) == 0);
  CHECK(fs::exists(dir / "cli-run/series.csv"));
  CHECK(slurp(out).find("verdict") != std::string::npos);

  // inspect prints the header and metrics of a snapshot.
  const PhaseSpaceGrid g = build_grid(16, 16, -6.0, 6.0, -6.0, 6.0);
  const PhysicalParams qp = testutil::params_of(1.0, 1.0, 1.0);
  const fs::path snap = dir / "peek.wps";
  write_snapshot(snap, gaussian_state(0.0, 0.0, std::sqrt(0.5), qp, g, 0), g);
  CHECK(run_cli("inspect " + snap.string(), out, err) == 0);
  const std::string inspect_out = slurp(out);
  CHECK(inspect_out.find("16") != std::string::npos);
  CHECK(inspect_out.find("kappa") != std::string::npos);

  // oracle-check accepts a lattice up to 1024 sites and reports the comparison.
  const fs::path oraclecfg = dir / "oracle.cfg";
  std::string oracle_doc =
      "[grid]\n"
      "nx = 32\n"
      "np = 32\n"
      "x_min = -8\n"
      "x_max = 10\n"
      "p_min = -4\n"
      "p_max = 4\n"
      "[params]\n"
      "kappa = 1\n"
      "[potential]\n"
      "family = morse\n"
      "D = 20\n"
      "a = 0.16\n"
      "[state]\n"
      "type = gaussian\n"
      "x0 = 1\n"
      "sigma_x = 1.2\n"
      "[propagation]\n"
      "engine = unified\n"
      "dt = 0.01\n"
      "n_steps = 10\n";
  spit(oraclecfg, oracle_doc);
  CHECK(run_cli("oracle-check " + oraclecfg.string(), out, err) == 0);
  CHECK(slurp(out).find("L_inf") != std::string::npos);
}
