#include "qsw/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace qsw {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out = "configuration problems:";
  for (const auto& s : v) out += "\n  - " + s;
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Parser {
  std::map<std::string, std::string> kv;
  std::vector<std::string> problems;
  std::vector<std::string> consumed;

  bool has(const std::string& key) const { return kv.count(key) > 0; }

  template <class F>
  void with(const std::string& key, F&& f) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    consumed.push_back(key);
    try {
      f(it->second);
    } catch (const std::exception& e) {
      problems.push_back(key + ": " + e.what());
    }
  }

  void number(const std::string& key, double& out) {
    with(key, [&](const std::string& s) { out = std::stod(s); });
  }
  void integer(const std::string& key, int& out) {
    with(key, [&](const std::string& s) { out = std::stoi(s); });
  }
  void uinteger(const std::string& key, std::uint64_t& out) {
    with(key, [&](const std::string& s) { out = std::stoull(s); });
  }
  void boolean(const std::string& key, bool& out) {
    with(key, [&](const std::string& s) {
      if (s == "true" || s == "1" || s == "on") out = true;
      else if (s == "false" || s == "0" || s == "off") out = false;
      else throw std::invalid_argument("expected true/false");
    });
  }
  void text(const std::string& key, std::string& out) {
    with(key, [&](const std::string& s) { out = s; });
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    with(key, [&](const std::string& s) {
      out.clear();
      std::istringstream in(s);
      double x;
      while (in >> x) out.push_back(x);
      if (out.empty()) throw std::invalid_argument("expected numbers");
    });
  }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), issues(std::move(problems)) {}

RunConfig parse_config_text(const std::string& text) {
  Parser p;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.problems.push_back("line " + std::to_string(lineno) +
                           ": expected `key = value`");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      p.problems.push_back("line " + std::to_string(lineno) +
                           ": empty key or value");
      continue;
    }
    if (!p.kv.emplace(key, value).second)
      p.problems.push_back(key + ": duplicate key");
  }

  RunConfig cfg;
  cfg.source_text = text;

  p.with("domain.shape", [&](const std::string& s) {
    cfg.domain.tag = shape_tag_from_string(s);
  });
  p.integer("domain.dimension", cfg.domain.dim);
  p.integer("domain.resolution", cfg.resolution);
  p.number("domain.radius", cfg.domain.radius);
  p.number("domain.r_inner", cfg.domain.r_inner);
  p.number("domain.r_outer", cfg.domain.r_outer);
  p.number("domain.hole_radius", cfg.domain.hole_radius);
  p.with("domain.lengths", [&](const std::string& s) {
    std::istringstream ls(s);
    std::vector<double> vals;
    double x;
    while (ls >> x) vals.push_back(x);
    if (vals.empty() || vals.size() > 3)
      throw std::invalid_argument("expected 1-3 lengths");
    for (std::size_t d = 0; d < 3; ++d)
      cfg.domain.lengths[d] = vals[std::min(d, vals.size() - 1)];
  });

  std::vector<double> single_p;
  p.numbers("exponent.p", single_p);
  p.numbers("exponent.p_list", cfg.p_list);
  p.numbers("exponent.crit_fractions", cfg.crit_fractions);
  p.number("exponent.crit_cap", cfg.crit_cap);
  if (!single_p.empty()) {
    if (!cfg.p_list.empty())
      p.problems.push_back("exponent.p: give either p or p_list, not both");
    else
      cfg.p_list = single_p;
  }

  p.number("solver.gtol", cfg.solver.gtol_rel);
  p.number("solver.gtol_abs", cfg.solver.gtol_abs);
  p.integer("solver.max_iter", cfg.solver.max_iter);
  p.boolean("solver.positivity", cfg.solver.positivity);
  p.number("solver.dedupe_radius", cfg.solver.dedupe_radius);
  p.number("solver.deflation_rho", cfg.solver.deflation_rho);
  p.integer("solver.deflation_rounds", cfg.solver.deflation_rounds);
  p.number("solver.project_tol", cfg.solver.project_tol);

  p.text("experiment.kind", cfg.experiment);
  p.integer("experiment.n_starts", cfg.n_starts);
  p.number("experiment.epsilon_fraction", cfg.epsilon_fraction);
  p.integer("experiment.ring_seeds", cfg.ring_seeds);
  p.number("experiment.bump_radius", cfg.bump_radius);

  p.integer("spectra.k", cfg.spectra_k);
  p.text("spectra.field", cfg.spectra_field);

  p.integer("kernel.samples", cfg.kernel_samples);
  p.number("kernel.bias", cfg.kernel_bias);

  p.text("output.dir", cfg.out_dir);
  p.uinteger("run.seed", cfg.seed);
  p.integer("run.threads", cfg.threads);

  for (const auto& [key, value] : p.kv)
    if (std::find(p.consumed.begin(), p.consumed.end(), key) ==
        p.consumed.end())
      p.problems.push_back(key + ": unknown key");

  // cross-field validation
  if (cfg.domain.dim != 2 && cfg.domain.dim != 3)
    p.problems.push_back("domain.dimension: must be 2 or 3");
  if (cfg.resolution < 8)
    p.problems.push_back("domain.resolution: must be >= 8");
  if (cfg.domain.tag == ShapeTag::annulus &&
      !(cfg.domain.r_inner > 0 && cfg.domain.r_outer > cfg.domain.r_inner))
    p.problems.push_back("domain.r_inner/r_outer: need 0 < r_inner < r_outer");
  if (cfg.domain.dim == 2 &&
      (!cfg.p_list.empty() || !cfg.crit_fractions.empty()) &&
      !(cfg.crit_cap > 4.0))
    p.problems.push_back(
        "exponent.crit_cap: 2-D runs need a cap > 4 standing in for the "
        "critical exponent");
  if (!cfg.crit_fractions.empty())
    for (double f : cfg.crit_fractions)
      if (!(f > 0.0 && f <= 1.0))
        p.problems.push_back("exponent.crit_fractions: fractions in (0, 1]");
  if (cfg.solver.max_iter < 1)
    p.problems.push_back("solver.max_iter: must be >= 1");
  if (!(cfg.solver.gtol_rel > 0))
    p.problems.push_back("solver.gtol: must be > 0");
  if (!(cfg.solver.dedupe_radius > 0))
    p.problems.push_back("solver.dedupe_radius: must be > 0");
  if (cfg.threads < 1) p.problems.push_back("run.threads: must be >= 1");
  if (cfg.kernel_samples < 0)
    p.problems.push_back("kernel.samples: must be >= 0");
  static const std::vector<std::string> kinds = {
      "solve", "sweep", "census", "barycenter", "concentration"};
  if (std::find(kinds.begin(), kinds.end(), cfg.experiment) == kinds.end())
    p.problems.push_back("experiment.kind: unknown experiment");

  if (!p.problems.empty()) throw ConfigError(std::move(p.problems));
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ExponentParams RunConfig::base_params() const {
  const std::vector<double> ps = exponents();
  if (ps.empty())
    throw ConfigError({"exponent.p: no exponent configured for this command"});
  return ExponentParams::make(ps.front(), domain.dim, crit_cap);
}

std::vector<double> RunConfig::exponents() const {
  std::vector<double> out = p_list;
  if (!crit_fractions.empty()) {
    const double crit = domain.dim >= 3
                            ? 4.0 * domain.dim / (domain.dim - 2.0)
                            : crit_cap;
    if (!(crit > 4.0))
      throw ConfigError({"exponent.crit_cap: needed to resolve fractions"});
    for (double f : crit_fractions) out.push_back(f * crit);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double RunConfig::effective_bump_radius(const DomainGrid& g) const {
  if (bump_radius > 0.0) return bump_radius;
  switch (g.spec.tag) {
    case ShapeTag::ball: return 0.45 * g.spec.radius;
    case ShapeTag::rectangle:
      return 0.2 * g.spec.lengths.head(g.dim).minCoeff();
    case ShapeTag::annulus:
      return 0.4 * (g.spec.r_outer - g.spec.r_inner);
    case ShapeTag::rectangle_with_hole:
      return 0.2 * (0.5 * g.spec.lengths.head(g.dim).minCoeff() -
                    g.spec.hole_radius);
  }
  return 0.1;
}

}  // namespace qsw
