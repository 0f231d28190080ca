// Command-line front end: kernel certification, single ground-state solves,
// exponent sweeps, multiplicity/barycenter censuses, and spectra on dumped
// fields. All numerical work lives in the library; this file is argument
// handling and artifact writing.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "qsw/config.hpp"
#include "qsw/io.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path, "config file path");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", args.seed, "RNG seed (overrides config)")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads, "worker count (overrides config)");
  cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

qsw::RunConfig load_config(const CommonArgs& args) {
  qsw::RunConfig cfg;
  if (!args.config_path.empty())
    cfg = qsw::parse_config_file(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.seed_set) cfg.seed = args.seed;
  if (args.threads > 0) cfg.threads = args.threads;
  cfg.solver.threads = cfg.threads;
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int run_kernel_check(const CommonArgs& args) {
  const auto start = Clock::now();
  const qsw::RunConfig cfg = load_config(args);
  if (cfg.kernel_samples == 0) {
    std::cerr << "kernel-check: kernel.samples = 0 leaves nothing to certify\n";
    return 2;
  }
  const auto rep = qsw::certify_inequalities(
      qsw::default_t_samples(cfg.kernel_samples), qsw::default_lambda_samples(),
      qsw::default_p_samples(), cfg.kernel_bias);
  qsw::write_text_file(cfg.out_dir + "/certificate.json",
                       qsw::to_json(rep).dump(2) + "\n");
  if (!args.quiet)
    std::cout << "certificate: " << rep.sample_count << " checks, worst margin "
              << rep.worst_margin << " (" << rep.worst_inequality << "), "
              << (rep.all_pass ? "all pass" : "FAILURES") << " ["
              << seconds_since(start) << " s]\n";
  if (!rep.all_pass) {
    std::cerr << "kernel-check: worst offender " << rep.worst_inequality
              << " with margin " << rep.worst_margin << "\n";
    return 1;
  }
  return 0;
}

qsw::Field initial_field(const qsw::DomainGrid& g) {
  return qsw::Field::Ones(g.n_interior());
}

int run_solve(const CommonArgs& args) {
  const auto start = Clock::now();
  qsw::RunConfig cfg = load_config(args);
  const auto g = qsw::build_domain(cfg.domain, cfg.resolution);
  const auto prm = cfg.base_params();
  auto rep = qsw::ground_state(g, prm, initial_field(g), cfg.solver);
  const auto morse = qsw::morse_index(g, rep.field, prm, cfg.spectra_k);
  rep.morse_index = morse.index;

  json j = qsw::to_json(rep);
  j["morse"] = qsw::to_json(morse);
  const std::string body = j.dump(2) + "\n";
  qsw::write_text_file(cfg.out_dir + "/solve.json", body);
  qsw::write_field(cfg.out_dir + "/solution.field", g, rep.field);
  qsw::write_manifest(cfg.out_dir, cfg.source_text, cfg.seed, cfg.threads,
                      {{"solve.json", body}}, seconds_since(start));
  if (!args.quiet)
    std::cout << "solve: p = " << rep.p << ", energy = " << rep.energy
              << ", morse index = " << morse.index
              << (rep.converged ? "" : " (NOT CONVERGED)") << " ["
              << seconds_since(start) << " s]\n";
  return rep.converged ? 0 : 3;
}

int run_sweep(const CommonArgs& args) {
  const auto start = Clock::now();
  qsw::RunConfig cfg = load_config(args);
  const auto g = qsw::build_domain(cfg.domain, cfg.resolution);
  const auto exps = cfg.exponents();
  if (exps.empty()) {
    std::cerr << "sweep: no exponents configured\n";
    return 2;
  }
  const auto base = qsw::ExponentParams::make(exps.front(), cfg.domain.dim,
                                              cfg.crit_cap);

  json j;
  bool converged = true;
  if (cfg.experiment == "concentration") {
    const auto res = qsw::concentration_probe(g, base, exps, cfg.solver);
    for (const auto& r : res.records) converged = converged && r.converged;
    j = qsw::to_json(res);
  } else {
    const auto res = qsw::level_sweep(g, base, exps, cfg.solver);
    converged = res.all_converged;
    j = qsw::to_json(res);
    qsw::write_text_file(cfg.out_dir + "/sweep.csv", qsw::sweep_csv(res));
    qsw::write_text_file(cfg.out_dir + "/sweep.gp", qsw::sweep_plot_script());
  }
  const std::string body = j.dump(2) + "\n";
  qsw::write_text_file(cfg.out_dir + "/sweep.json", body);
  qsw::write_manifest(cfg.out_dir, cfg.source_text, cfg.seed, cfg.threads,
                      {{"sweep.json", body}}, seconds_since(start));
  if (!args.quiet)
    std::cout << "sweep: " << exps.size() << " exponents"
              << (converged ? "" : " (NOT ALL CONVERGED)") << " ["
              << seconds_since(start) << " s]\n";
  return converged ? 0 : 3;
}

int run_census(const CommonArgs& args) {
  const auto start = Clock::now();
  qsw::RunConfig cfg = load_config(args);
  const auto g = qsw::build_domain(cfg.domain, cfg.resolution);
  const auto prm = cfg.base_params();
  const double r = cfg.effective_bump_radius(g);

  json j;
  bool ok = true;
  if (cfg.experiment == "barycenter") {
    const auto res = qsw::barycenter_census(g, prm, cfg.n_starts,
                                            cfg.epsilon_fraction, r, cfg.seed,
                                            cfg.solver);
    ok = res.conclusive;
    j = qsw::to_json(res);
    qsw::write_text_file(cfg.out_dir + "/barycenter.csv",
                         qsw::barycenter_csv(res));
    qsw::write_text_file(cfg.out_dir + "/barycenter.gp",
                         qsw::barycenter_plot_script());
  } else {
    const auto res =
        qsw::multiplicity_census(g, prm, cfg.ring_seeds, r, cfg.solver);
    ok = !res.solutions.empty();
    j = qsw::to_json(res);
    qsw::write_text_file(cfg.out_dir + "/census.csv", qsw::census_csv(res));
    int idx = 0;
    for (const auto& e : res.solutions)
      qsw::write_field(cfg.out_dir + "/solution_" + std::to_string(idx++) +
                           ".field",
                       g, e.report.field);
  }
  const std::string body = j.dump(2) + "\n";
  qsw::write_text_file(cfg.out_dir + "/census.json", body);
  qsw::write_manifest(cfg.out_dir, cfg.source_text, cfg.seed, cfg.threads,
                      {{"census.json", body}}, seconds_since(start));
  if (!args.quiet)
    std::cout << "census: done" << (ok ? "" : " (INCONCLUSIVE)") << " ["
              << seconds_since(start) << " s]\n";
  return ok ? 0 : 3;
}

int run_spectra(const CommonArgs& args) {
  const auto start = Clock::now();
  qsw::RunConfig cfg = load_config(args);
  if (cfg.spectra_field.empty()) {
    std::cerr << "spectra: spectra.field must point at a field dump\n";
    return 2;
  }
  const auto loaded = qsw::read_field(cfg.spectra_field);
  const auto prm = qsw::ExponentParams::make(
      cfg.exponents().empty() ? 6.0 : cfg.exponents().front(),
      loaded.grid.dim, cfg.crit_cap);
  const auto morse = qsw::morse_index(loaded.grid, loaded.values, prm,
                                      cfg.spectra_k);
  const auto profile =
      qsw::compactness_probe(loaded.grid, loaded.values, prm,
                             std::min(32, loaded.grid.n_interior()));
  json j = qsw::to_json(morse);
  j["compactness_profile"] = profile;
  const std::string body = j.dump(2) + "\n";
  qsw::write_text_file(cfg.out_dir + "/spectra.json", body);
  if (!args.quiet)
    std::cout << "spectra: morse index " << morse.index << " ["
              << seconds_since(start) << " s]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"positive ground states and multiplicity for the quasilinear "
               "problem -Lap u - Lap(u^2)u = |u|^{p-2}u"};
  app.require_subcommand(1);

  CommonArgs kernel_args, solve_args, sweep_args, census_args, spectra_args;
  auto* kernel = app.add_subcommand("kernel-check",
                                    "certify the change-of-variable inequalities");
  add_common(kernel, kernel_args, false);
  auto* solve = app.add_subcommand("solve", "single ground-state solve");
  add_common(solve, solve_args, true);
  auto* sweep = app.add_subcommand("sweep",
                                   "ground levels along an exponent list");
  add_common(sweep, sweep_args, true);
  auto* census = app.add_subcommand("census",
                                    "multiplicity or barycenter census");
  add_common(census, census_args, true);
  auto* spectra = app.add_subcommand("spectra",
                                     "Morse report for a dumped field");
  add_common(spectra, spectra_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (kernel->parsed()) return run_kernel_check(kernel_args);
    if (solve->parsed()) return run_solve(solve_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
    if (census->parsed()) return run_census(census_args);
    if (spectra->parsed()) return run_spectra(spectra_args);
  } catch (const qsw::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
