#include "qsw/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qsw {

using nlohmann::json;

namespace {

json vec3(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

json shape_json(const ShapeSpec& s) {
  json j;
  j["tag"] = to_string(s.tag);
  j["dim"] = s.dim;
  switch (s.tag) {
    case ShapeTag::ball: j["radius"] = s.radius; break;
    case ShapeTag::annulus:
      j["r_inner"] = s.r_inner;
      j["r_outer"] = s.r_outer;
      break;
    case ShapeTag::rectangle: j["lengths"] = vec3(s.lengths); break;
    case ShapeTag::rectangle_with_hole:
      j["lengths"] = vec3(s.lengths);
      j["hole_radius"] = s.hole_radius;
      break;
  }
  return j;
}

ShapeSpec shape_from_json(const json& j) {
  ShapeSpec s;
  s.tag = shape_tag_from_string(j.at("tag").get<std::string>());
  s.dim = j.at("dim").get<int>();
  if (j.contains("radius")) s.radius = j["radius"].get<double>();
  if (j.contains("r_inner")) s.r_inner = j["r_inner"].get<double>();
  if (j.contains("r_outer")) s.r_outer = j["r_outer"].get<double>();
  if (j.contains("hole_radius")) s.hole_radius = j["hole_radius"].get<double>();
  if (j.contains("lengths"))
    for (int d = 0; d < 3; ++d) s.lengths[d] = j["lengths"][d].get<double>();
  return s;
}

std::vector<std::int64_t> mask_rle(const std::vector<std::uint8_t>& mask) {
  // alternating run lengths, first run counts zeros (possibly 0)
  std::vector<std::int64_t> runs;
  std::uint8_t current = 0;
  std::int64_t len = 0;
  for (std::uint8_t m : mask) {
    if (m == current) {
      ++len;
    } else {
      runs.push_back(len);
      current = m;
      len = 1;
    }
  }
  runs.push_back(len);
  return runs;
}

}  // namespace

json to_json(const CertificateReport& rep, bool include_records) {
  json j;
  j["all_pass"] = rep.all_pass;
  j["tolerance"] = rep.tolerance;
  j["worst_margin"] = rep.worst_margin;
  j["worst_inequality"] = rep.worst_inequality;
  j["sample_count"] = rep.sample_count;
  j["constant_lower_bound"] = {{"value", rep.constant_lower_bound},
                               {"definition", "f(1)"}};
  j["asymptotic_constant"] = {{"value", rep.asymptotic_constant},
                              {"status", "derived"}};
  j["margin_normalization"] = "(lhs - rhs) / max(1, |lhs|, |rhs|)";
  if (include_records) {
    json recs = json::array();
    for (const auto& r : rep.records) {
      recs.push_back({{"inequality", r.inequality},
                      {"t", r.t},
                      {"lambda", r.lambda},
                      {"p", r.p},
                      {"margin", r.margin},
                      {"pass", r.pass}});
    }
    j["records"] = std::move(recs);
  }
  return j;
}

json to_json(const MorseReport& rep) {
  json j;
  j["index"] = rep.index;
  j["eigenvalues"] = rep.eigenvalues;
  j["residuals"] = rep.residuals;
  j["k"] = rep.k;
  j["gap"] = rep.gap;
  j["near_degenerate"] = rep.near_degenerate;
  j["degeneracy_tol"] = rep.degeneracy_tol;
  j["warning_nonconverged"] = rep.warning_nonconverged;
  j["used_dense"] = rep.used_dense;
  return j;
}

json to_json(const CriticalPointReport& rep, bool include_field) {
  json j;
  j["p"] = rep.p;
  j["crit"] = rep.crit;
  j["dim"] = rep.dim;
  j["energy"] = rep.energy;
  j["grad_norm"] = rep.grad_norm;
  j["nehari_residual"] = rep.nehari_residual;
  j["norm_h1"] = rep.norm_h1;
  j["sup_norm"] = rep.sup_norm;
  j["width"] = rep.width;
  j["barycenter"] = vec3(rep.barycenter);
  j["positive"] = rep.positive;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["outside_paper_hypotheses"] = rep.outside_paper_hypotheses;
  if (rep.morse_index >= 0) j["morse_index"] = rep.morse_index;
  j["deflation_distances"] = rep.deflation_distances;
  if (include_field)
    j["field"] = std::vector<double>(rep.field.data(),
                                     rep.field.data() + rep.field.size());
  return j;
}

json to_json(const SweepResult& res) {
  json recs = json::array();
  for (const auto& r : res.records) {
    recs.push_back({{"p", r.p},
                    {"m_p", r.m_p},
                    {"t_star", r.t_star},
                    {"i_star", r.i_star},
                    {"width", r.width},
                    {"sup_norm", r.sup_norm},
                    {"norm_h1", r.norm_h1},
                    {"grad_norm", r.grad_norm},
                    {"nehari_residual", r.nehari_residual},
                    {"barycenter", vec3(r.barycenter)},
                    {"converged", r.converged}});
  }
  return json{{"records", std::move(recs)},
              {"m_star_extrapolated", res.m_star_extrapolated},
              {"m_star_projected", res.m_star_projected},
              {"m_star_bookkeeping_min", res.m_star_bookkeeping_min},
              {"all_converged", res.all_converged}};
}

json to_json(const BarycenterCensusResult& res) {
  json samples = json::array();
  for (const auto& s : res.samples)
    samples.push_back({{"energy", s.energy},
                       {"t", s.t},
                       {"beta", vec3(s.beta)},
                       {"low_energy", s.low_energy},
                       {"inside", s.inside}});
  return json{{"m_p", res.m_p},
              {"epsilon", res.epsilon},
              {"r", res.r},
              {"n_generated", res.n_generated},
              {"n_low_energy", res.n_low_energy},
              {"n_inside", res.n_inside},
              {"fraction_inside", res.fraction_inside},
              {"conclusive", res.conclusive},
              {"samples", std::move(samples)}};
}

json to_json(const ConcentrationResult& res) {
  json recs = json::array();
  for (const auto& r : res.records)
    recs.push_back({{"p", r.p},
                    {"m_p", r.m_p},
                    {"width", r.width},
                    {"sup_norm", r.sup_norm},
                    {"pohozaev_abs", r.pohozaev_abs},
                    {"converged", r.converged},
                    {"under_resolved", r.under_resolved}});
  return json{{"records", std::move(recs)},
              {"sobolev_constant", res.sobolev_constant},
              {"ps_threshold", res.ps_threshold},
              {"under_resolved_at_start", res.under_resolved_at_start}};
}

json to_json(const CensusResult& res) {
  json sols = json::array();
  for (const auto& e : res.solutions) {
    json s = to_json(e.report);
    s["morse"] = to_json(e.morse);
    sols.push_back(std::move(s));
  }
  return json{{"solutions", std::move(sols)},
              {"expected_cat", res.expected_cat},
              {"expected_morse_count", res.expected_morse_count},
              {"found_positive", res.found_positive},
              {"bump_radius", res.bump_radius},
              {"found", res.solutions.size()}};
}

void write_field(const std::string& path, const DomainGrid& g, const Field& v) {
  if (v.size() != g.n_interior())
    throw std::invalid_argument("write_field: size mismatch");
  json header;
  header["format"] = "qsw-field-1";
  header["shape"] = shape_json(g.spec);
  header["resolution"] = g.resolution;
  header["spacing"] = g.h;
  header["origin"] = vec3(g.origin);
  header["nodes"] = {g.shape[0], g.shape[1], g.shape[2]};
  header["mask_rle"] = mask_rle(g.mask);
  header["n_interior"] = g.n_interior();

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_field: cannot open " + path);
  out << header.dump() << "\n";
  char buf[40];
  for (int i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v[i]);
    out << buf;
  }
}

LoadedField read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_field: cannot open " + path);
  std::string header_line;
  std::getline(in, header_line);
  const json header = json::parse(header_line);
  if (header.at("format").get<std::string>() != "qsw-field-1")
    throw std::runtime_error("read_field: unknown format");

  LoadedField out;
  out.grid = build_domain(shape_from_json(header.at("shape")),
                          header.at("resolution").get<int>());
  const auto rle = header.at("mask_rle").get<std::vector<std::int64_t>>();
  if (mask_rle(out.grid.mask) != rle)
    throw std::runtime_error("read_field: mask does not match rebuilt grid");

  const int n = header.at("n_interior").get<int>();
  if (n != out.grid.n_interior())
    throw std::runtime_error("read_field: interior count mismatch");
  out.values.resize(n);
  for (int i = 0; i < n; ++i)
    if (!(in >> out.values[i]))
      throw std::runtime_error("read_field: truncated value block");
  return out;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

void write_manifest(const std::string& dir, const std::string& config_text,
                    std::uint64_t seed, int threads,
                    const std::vector<std::pair<std::string, std::string>>& outputs,
                    double wall_seconds) {
  json j;
  j["config_hash"] = fnv1a64_hex(config_text + "\nseed=" + std::to_string(seed) +
                                 "\nthreads=" + std::to_string(threads));
  std::string all;
  json names = json::array();
  for (const auto& [name, bytes] : outputs) {
    all += name + ":" + bytes + "\n";
    names.push_back(name);
  }
  j["output_hash"] = fnv1a64_hex(all);
  j["outputs"] = std::move(names);
  j["seed"] = seed;
  j["threads"] = threads;
  j["wall_seconds"] = wall_seconds;  // informational; not hashed
  j["versions"] = {{"qsw", "1.0.0"},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  write_text_file(dir + "/manifest.json", j.dump(2) + "\n");
}

std::string sweep_csv(const SweepResult& res) {
  std::ostringstream out;
  out << "p,m_p,t_star,i_star,width,sup_norm,norm_h1,bary_x,bary_y,bary_z,"
         "converged\n";
  char buf[400];
  for (const auto& r : res.records) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  r.p, r.m_p, r.t_star, r.i_star, r.width, r.sup_norm,
                  r.norm_h1, r.barycenter[0], r.barycenter[1], r.barycenter[2],
                  r.converged ? 1 : 0);
    out << buf;
  }
  return out.str();
}

std::string sweep_plot_script() {
  return R"(# gnuplot script for the exponent sweep
set datafile separator ','
set key autotitle columnhead
set terminal pngcairo size 900,600

set output 'sweep_levels.png'
set xlabel 'p'
set ylabel 'ground level'
plot 'sweep.csv' using 1:2 with linespoints title 'm_p', \
     'sweep.csv' using 1:4 with linespoints title 'I_*(t_* g_p)'

set output 'sweep_width.png'
set ylabel 'width'
plot 'sweep.csv' using 1:5 with linespoints title 'width'

set output 'sweep_barycenter.png'
set xlabel 'x'
set ylabel 'y'
plot 'sweep.csv' using 8:9 with points pt 7 title 'barycenter'
)";
}

std::string census_csv(const CensusResult& res) {
  std::ostringstream out;
  out << "energy,morse_index,positive,sup_norm,bary_x,bary_y,bary_z\n";
  char buf[300];
  for (const auto& e : res.solutions) {
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g\n",
                  e.report.energy, e.morse.index, e.report.positive ? 1 : 0,
                  e.report.sup_norm, e.report.barycenter[0],
                  e.report.barycenter[1], e.report.barycenter[2]);
    out << buf;
  }
  return out.str();
}

std::string barycenter_csv(const BarycenterCensusResult& res) {
  std::ostringstream out;
  out << "energy,t,beta_x,beta_y,beta_z,low_energy,inside\n";
  char buf[300];
  for (const auto& s : res.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                  s.energy, s.t, s.beta[0], s.beta[1], s.beta[2],
                  s.low_energy ? 1 : 0, s.inside ? 1 : 0);
    out << buf;
  }
  return out.str();
}

std::string barycenter_plot_script() {
  return R"(# gnuplot script for the barycenter census
set datafile separator ','
set key autotitle columnhead
set terminal pngcairo size 700,700
set output 'barycenter_scatter.png'
set xlabel 'x'
set ylabel 'y'
set size square
plot 'barycenter.csv' using 3:4 with points pt 7 title 'beta'
)";
}

}  // namespace qsw
