#pragma once

// Serialization: JSON report writers, the field dump format (one JSON header
// line followed by one value per line), run manifests, CSV and gnuplot
// emitters for the sweep outputs.

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "qsw/experiments.hpp"
#include "qsw/transform.hpp"

namespace qsw {

nlohmann::json to_json(const CertificateReport& rep, bool include_records = true);
nlohmann::json to_json(const MorseReport& rep);
nlohmann::json to_json(const CriticalPointReport& rep, bool include_field = false);
nlohmann::json to_json(const SweepResult& res);
nlohmann::json to_json(const BarycenterCensusResult& res);
nlohmann::json to_json(const ConcentrationResult& res);
nlohmann::json to_json(const CensusResult& res);

/// Header line: {"format":"qsw-field-1", shape spec, resolution, spacing,
/// mask run lengths}; then one interior value per line, full precision.
void write_field(const std::string& path, const DomainGrid& g, const Field& v);

struct LoadedField {
  DomainGrid grid;
  Field values;
};
LoadedField read_field(const std::string& path);

std::string fnv1a64_hex(const std::string& bytes);

/// Manifest: config hash, output hash (numerical artifacts only), versions,
/// wall time. `outputs` maps artifact name -> serialized bytes.
void write_manifest(const std::string& dir, const std::string& config_text,
                    std::uint64_t seed, int threads,
                    const std::vector<std::pair<std::string, std::string>>& outputs,
                    double wall_seconds);

void write_text_file(const std::string& path, const std::string& text);

std::string sweep_csv(const SweepResult& res);
/// gnuplot script rendering m_p vs p, width vs p and the barycenter scatter
/// from the CSV files next to it.
std::string sweep_plot_script();
std::string census_csv(const CensusResult& res);
std::string barycenter_csv(const BarycenterCensusResult& res);
std::string barycenter_plot_script();

}  // namespace qsw
