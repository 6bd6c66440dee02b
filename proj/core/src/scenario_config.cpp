#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "kappadyn/scenario_io.hpp"

namespace kappadyn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

constexpr const char* kSections[] = {"grid", "params", "potential", "state",
                                     "propagation", "output", "analysis"};

bool known_section(std::string_view s) {
  return std::find(std::begin(kSections), std::end(kSections), s) != std::end(kSections);
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Doc {
  std::map<std::string, Entry, std::less<>> entries;
  std::vector<ParseIssue>* issues;

  void complain(int line, std::string key, std::string message) {
    issues->push_back(ParseIssue{line, std::move(key), std::move(message)});
  }

  Entry* find(std::string_view key) {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  // Returns the value string, or nullptr; missing required keys are reported.
  const std::string* get(std::string_view key, bool required) {
    Entry* e = find(key);
    if (!e) {
      if (required) complain(0, std::string(key), "required key is missing");
      return nullptr;
    }
    return &e->value;
  }

  int line_of(std::string_view key) const {
    auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
  }

  bool parse_f64(std::string_view key, bool required, double fallback, double& out) {
    out = fallback;
    const std::string* v = get(key, required);
    if (!v) return !required;
    double parsed = 0.0;
    const char* end = v->data() + v->size();
    auto [p, ec] = std::from_chars(v->data(), end, parsed);
    if (ec != std::errc{} || p != end || !std::isfinite(parsed)) {
      complain(line_of(key), std::string(key), "not a finite number: '" + *v + "'");
      return false;
    }
    out = parsed;
    return true;
  }

  bool parse_i64(std::string_view key, bool required, long fallback, long& out) {
    out = fallback;
    const std::string* v = get(key, required);
    if (!v) return !required;
    long parsed = 0;
    const char* end = v->data() + v->size();
    auto [p, ec] = std::from_chars(v->data(), end, parsed);
    if (ec != std::errc{} || p != end) {
      complain(line_of(key), std::string(key), "not an integer: '" + *v + "'");
      return false;
    }
    out = parsed;
    return true;
  }
};

Doc scan(std::string_view text, std::vector<ParseIssue>& issues) {
  Doc doc;
  doc.issues = &issues;
  std::string section;
  bool section_known = false;
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line;

    const std::size_t comment = raw.find_first_of("#;");
    if (comment != std::string_view::npos) raw = raw.substr(0, comment);
    const std::string_view sv = trim(raw);
    if (sv.empty()) continue;

    if (sv.front() == '[') {
      if (sv.back() != ']') {
        doc.complain(line, "", "unterminated section header");
        continue;
      }
      section = std::string(trim(sv.substr(1, sv.size() - 2)));
      section_known = known_section(section);
      if (!section_known) doc.complain(line, section, "unknown section");
      continue;
    }

    const std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos) {
      doc.complain(line, "", "expected key = value");
      continue;
    }
    if (section.empty()) {
      doc.complain(line, "", "key outside any section");
      continue;
    }
    if (!section_known) continue;  // already reported at the header

    const std::string key = section + "." + std::string(trim(sv.substr(0, eq)));
    const std::string value(trim(sv.substr(eq + 1)));
    auto [it, inserted] = doc.entries.try_emplace(key, Entry{value, line, false});
    if (!inserted) doc.complain(line, key, "duplicate key");
  }
  return doc;
}

std::string fmt_f64(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ParseResult parse_config(std::string_view text) {
  ParseResult result;
  Doc doc = scan(text, result.issues);
  ScenarioConfig cfg;

  // [grid]
  long nx = 0, np = 0;
  doc.parse_i64("grid.nx", true, 0, nx);
  doc.parse_i64("grid.np", true, 0, np);
  for (auto [key, val] : {std::pair{"grid.nx", nx}, {"grid.np", np}}) {
    if (doc.line_of(key) && (val < 8 || val % 2)) {
      doc.complain(doc.line_of(key), key, "grid counts must be even and >= 8");
    }
  }
  cfg.nx = static_cast<int>(nx);
  cfg.np = static_cast<int>(np);
  doc.parse_f64("grid.x_min", true, 0.0, cfg.x_min);
  doc.parse_f64("grid.x_max", true, 0.0, cfg.x_max);
  doc.parse_f64("grid.p_min", true, 0.0, cfg.p_min);
  doc.parse_f64("grid.p_max", true, 0.0, cfg.p_max);
  if (doc.line_of("grid.x_max") && !(cfg.x_min < cfg.x_max)) {
    doc.complain(doc.line_of("grid.x_max"), "grid.x_max", "x_max must exceed x_min");
  }
  if (doc.line_of("grid.p_max") && !(cfg.p_min < cfg.p_max)) {
    doc.complain(doc.line_of("grid.p_max"), "grid.p_max", "p_max must exceed p_min");
  }

  // [params]
  doc.parse_f64("params.hbar", false, 1.0, cfg.params.hbar);
  doc.parse_f64("params.mass", false, 1.0, cfg.params.mass);
  doc.parse_f64("params.kappa", true, 1.0, cfg.params.kappa);
  if (doc.line_of("params.hbar") && !(cfg.params.hbar > 0.0)) {
    doc.complain(doc.line_of("params.hbar"), "params.hbar", "hbar must be positive");
  }
  if (doc.line_of("params.mass") && !(cfg.params.mass > 0.0)) {
    doc.complain(doc.line_of("params.mass"), "params.mass", "mass must be positive");
  }
  if (doc.line_of("params.kappa") &&
      !(cfg.params.kappa >= 0.0 && cfg.params.kappa <= 1.0)) {
    doc.complain(doc.line_of("params.kappa"), "params.kappa", "kappa must lie in [0,1]");
  }

  // [potential]
  if (const std::string* family = doc.get("potential.family", true)) {
    if (*family == "free") {
      cfg.potential = Potential::free_particle();
    } else if (*family == "harmonic") {
      double m = 1.0, omega = 1.0;
      doc.parse_f64("potential.m", false, 1.0, m);
      doc.parse_f64("potential.omega", false, 1.0, omega);
      if (!(m > 0.0)) {
        doc.complain(doc.line_of("potential.m"), "potential.m", "harmonic m must be positive");
      }
      if (!(omega > 0.0)) {
        doc.complain(doc.line_of("potential.omega"), "potential.omega",
                     "harmonic omega must be positive");
      }
      cfg.potential = Potential::harmonic(m, omega);
    } else if (*family == "morse") {
      double D = 0.0, a = 0.0;
      doc.parse_f64("potential.D", true, 0.0, D);
      doc.parse_f64("potential.a", true, 0.0, a);
      if (doc.line_of("potential.D") && !(D > 0.0)) {
        doc.complain(doc.line_of("potential.D"), "potential.D", "morse depth must be positive");
      }
      if (doc.line_of("potential.a") && !(a > 0.0)) {
        doc.complain(doc.line_of("potential.a"), "potential.a", "morse range must be positive");
      }
      cfg.potential = Potential::morse(D, a);
    } else if (*family == "polynomial") {
      std::vector<double> coeffs;
      if (const std::string* raw = doc.get("potential.coefficients", true)) {
        const char* p = raw->data();
        const char* end = p + raw->size();
        while (p != end) {
          while (p != end && (*p == ' ' || *p == '\t')) ++p;
          if (p == end) break;
          double c = 0.0;
          auto [q, ec] = std::from_chars(p, end, c);
          if (ec != std::errc{} || !std::isfinite(c)) {
            doc.complain(doc.line_of("potential.coefficients"), "potential.coefficients",
                         "not a finite number list: '" + *raw + "'");
            coeffs.clear();
            break;
          }
          coeffs.push_back(c);
          p = q;
        }
        if (coeffs.empty()) {
          doc.complain(doc.line_of("potential.coefficients"), "potential.coefficients",
                       "polynomial needs at least one coefficient");
        }
      }
      cfg.potential = Potential::polynomial(std::move(coeffs));
    } else {
      doc.complain(doc.line_of("potential.family"), "potential.family",
                   "unknown family '" + *family + "'");
    }
  }

  // [state]
  if (const std::string* type = doc.get("state.type", true)) {
    if (*type == "gaussian") {
      GaussianInit g;
      doc.parse_f64("state.x0", false, 0.0, g.x0);
      doc.parse_f64("state.p0", false, 0.0, g.p0);
      doc.parse_f64("state.sigma_x", true, 1.0, g.sigma_x);
      if (doc.line_of("state.sigma_x") && !(g.sigma_x > 0.0)) {
        doc.complain(doc.line_of("state.sigma_x"), "state.sigma_x", "sigma_x must be positive");
      }
      long order = 0;
      doc.parse_i64("state.hermite_order", false, 0, order);
      if (order != 0 && order != 1) {
        doc.complain(doc.line_of("state.hermite_order"), "state.hermite_order",
                     "hermite_order must be 0 or 1");
      }
      g.hermite_order = static_cast<int>(order);
      cfg.initial = g;
    } else if (*type == "file") {
      FileInit f;
      if (const std::string* path = doc.get("state.path", true)) {
        if (path->empty()) {
          doc.complain(doc.line_of("state.path"), "state.path", "path must not be empty");
        }
        f.path = *path;
      }
      cfg.initial = f;
    } else {
      doc.complain(doc.line_of("state.type"), "state.type", "unknown type '" + *type + "'");
    }
  }

  // [propagation]
  if (const std::string* engine = doc.get("propagation.engine", true)) {
    if (*engine == "unified") {
      cfg.prop.engine = Engine::unified;
    } else if (*engine == "kvn") {
      cfg.prop.engine = Engine::kvn;
    } else if (*engine == "liouville") {
      cfg.prop.engine = Engine::liouville;
    } else {
      doc.complain(doc.line_of("propagation.engine"), "propagation.engine",
                   "unknown engine '" + *engine + "'");
    }
  }
  if (const std::string* scheme = doc.get("propagation.scheme", false)) {
    if (*scheme != "strang") {
      doc.complain(doc.line_of("propagation.scheme"), "propagation.scheme",
                   "unknown scheme '" + *scheme + "'");
    }
  }
  doc.parse_f64("propagation.dt", true, 0.01, cfg.prop.dt);
  if (doc.line_of("propagation.dt") && !(cfg.prop.dt > 0.0)) {
    doc.complain(doc.line_of("propagation.dt"), "propagation.dt", "dt must be positive");
  }
  doc.parse_i64("propagation.n_steps", true, 0, cfg.prop.n_steps);
  if (doc.line_of("propagation.n_steps") && cfg.prop.n_steps <= 0) {
    doc.complain(doc.line_of("propagation.n_steps"), "propagation.n_steps",
                 "n_steps must be positive");
  }
  doc.parse_i64("propagation.record_every", false, 1, cfg.prop.record_every);
  if (cfg.prop.record_every < 1) {
    doc.complain(doc.line_of("propagation.record_every"), "propagation.record_every",
                 "record_every must be >= 1");
  } else if (cfg.prop.n_steps > 0 && cfg.prop.n_steps % cfg.prop.record_every != 0) {
    doc.complain(doc.line_of("propagation.record_every"), "propagation.record_every",
                 "record_every must divide n_steps");
  }

  // [output]
  if (const std::string* dir = doc.get("output.directory", false)) {
    if (dir->empty()) {
      doc.complain(doc.line_of("output.directory"), "output.directory",
                   "directory must not be empty");
    } else {
      cfg.output_directory = *dir;
    }
  }
  doc.parse_i64("output.snapshot_every", false, 0, cfg.snapshot_every);
  if (cfg.snapshot_every < 0) {
    doc.complain(doc.line_of("output.snapshot_every"), "output.snapshot_every",
                 "snapshot_every must be non-negative");
  }
  cfg.prop.snapshot_stride = cfg.snapshot_every;

  // [analysis]
  doc.parse_f64("analysis.classify_tolerance", false, 0.05, cfg.classify_tolerance);
  if (!(cfg.classify_tolerance > 0.0)) {
    doc.complain(doc.line_of("analysis.classify_tolerance"), "analysis.classify_tolerance",
                 "classify_tolerance must be positive");
  }
  doc.parse_f64("analysis.area_threshold_rel", false, kDefaultAreaThetaRel,
                cfg.area_theta_rel);
  if (!(cfg.area_theta_rel >= 0.0)) {
    doc.complain(doc.line_of("analysis.area_threshold_rel"), "analysis.area_threshold_rel",
                 "area_threshold_rel must be non-negative");
  }
  cfg.prop.area_theta_rel = cfg.area_theta_rel;

  for (const auto& [key, entry] : doc.entries) {
    if (!entry.used) result.issues.push_back(ParseIssue{entry.line, key, "unknown key"});
  }

  if (result.issues.empty()) {
    result.config = std::move(cfg);
  } else {
    std::sort(result.issues.begin(), result.issues.end(),
              [](const ParseIssue& a, const ParseIssue& b) { return a.line < b.line; });
  }
  return result;
}

std::string serialize_config(const ScenarioConfig& config) {
  std::string out;
  out.reserve(1024);
  const auto put = [&](std::string_view s) { out.append(s); };
  const auto kv = [&](std::string_view key, const std::string& value) {
    out.append(key);
    out.append(" = ");
    out.append(value);
    out.push_back('\n');
  };

  put("[grid]\n");
  kv("nx", std::to_string(config.nx));
  kv("np", std::to_string(config.np));
  kv("x_min", fmt_f64(config.x_min));
  kv("x_max", fmt_f64(config.x_max));
  kv("p_min", fmt_f64(config.p_min));
  kv("p_max", fmt_f64(config.p_max));

  put("\n[params]\n");
  kv("hbar", fmt_f64(config.params.hbar));
  kv("mass", fmt_f64(config.params.mass));
  kv("kappa", fmt_f64(config.params.kappa));

  put("\n[potential]\n");
  switch (config.potential.family) {
    case Potential::Family::free:
      kv("family", "free");
      break;
    case Potential::Family::harmonic:
      kv("family", "harmonic");
      kv("m", fmt_f64(config.potential.m));
      kv("omega", fmt_f64(config.potential.omega));
      break;
    case Potential::Family::morse:
      kv("family", "morse");
      kv("D", fmt_f64(config.potential.D));
      kv("a", fmt_f64(config.potential.a));
      break;
    case Potential::Family::polynomial: {
      kv("family", "polynomial");
      std::string list;
      for (std::size_t i = 0; i < config.potential.coeffs.size(); ++i) {
        if (i) list.push_back(' ');
        list += fmt_f64(config.potential.coeffs[i]);
      }
      kv("coefficients", list);
      break;
    }
  }

  put("\n[state]\n");
  if (const GaussianInit* g = std::get_if<GaussianInit>(&config.initial)) {
    kv("type", "gaussian");
    kv("x0", fmt_f64(g->x0));
    kv("p0", fmt_f64(g->p0));
    kv("sigma_x", fmt_f64(g->sigma_x));
    kv("hermite_order", std::to_string(g->hermite_order));
  } else {
    kv("type", "file");
    kv("path", std::get<FileInit>(config.initial).path);
  }

  put("\n[propagation]\n");
  switch (config.prop.engine) {
    case Engine::unified:
      kv("engine", "unified");
      break;
    case Engine::kvn:
      kv("engine", "kvn");
      break;
    case Engine::liouville:
      kv("engine", "liouville");
      break;
  }
  kv("scheme", "strang");
  kv("dt", fmt_f64(config.prop.dt));
  kv("n_steps", std::to_string(config.prop.n_steps));
  kv("record_every", std::to_string(config.prop.record_every));

  put("\n[output]\n");
  kv("directory", config.output_directory);
  kv("snapshot_every", std::to_string(config.snapshot_every));

  put("\n[analysis]\n");
  kv("classify_tolerance", fmt_f64(config.classify_tolerance));
  kv("area_threshold_rel", fmt_f64(config.area_theta_rel));
  return out;
}

}  // namespace kappadyn
