#pragma once

// Run configuration from a flat key-value text file (one `key = value` per
// line, `#` comments). Unknown keys and invalid values are collected and
// reported together, each with its key path.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsw/nehari.hpp"

namespace qsw {

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> issues;
};

struct RunConfig {
  ShapeSpec domain;
  int resolution = 16;

  std::vector<double> p_list;           // explicit exponents, or
  std::vector<double> crit_fractions;   // fractions of the critical exponent
  double crit_cap = 0.0;                // stands in for crit when dim == 2

  SolveOptions solver;

  std::string experiment = "solve";
  int n_starts = 16;
  double epsilon_fraction = 0.1;
  int ring_seeds = 8;
  double bump_radius = 0.0;  // 0 = choose from the geometry

  int spectra_k = 6;
  std::string spectra_field;

  int kernel_samples = 1250;
  double kernel_bias = 0.0;

  std::string out_dir = "out";
  std::uint64_t seed = 1234;
  int threads = 1;

  std::string source_text;  // raw file contents, hashed into the manifest

  ExponentParams base_params() const;
  /// p_list resolved against the critical exponent (fractions included),
  /// sorted ascending.
  std::vector<double> exponents() const;
  /// Largest bump radius fitting the shape when bump_radius == 0.
  double effective_bump_radius(const DomainGrid& g) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace qsw
