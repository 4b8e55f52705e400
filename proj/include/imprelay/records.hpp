#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "imprelay/sim_engine.hpp"

namespace imprelay {

/// 9 significant digits, printf "%.9g".
std::string format_number(double v);

/// Stable 64-bit hash of the canonical config document, hex encoded.
std::string config_digest(const SimulationConfig& config);

/// Sweep table. The first line is a comment naming the manifest; no
/// timestamps, so equal configs give byte-identical output.
std::string sweep_csv(const std::vector<SweepRecord>& records, const SimulationConfig& config,
                      const std::string& manifest_name);

struct CurveRow {
  double snr_db = 0.0;
  std::string scheme;  ///< overall, rank1..rankM, all_bad
  double ber_relay = 0.0;
  double ber_dest = 0.0;
  double p_out = 0.0;
  double asym_ber_relay = 0.0;
  double asym_ber_dest = 0.0;
  double asym_pout = 0.0;
};

std::vector<CurveRow> analytic_curves(const SimulationConfig& config);
std::string curves_csv(const std::vector<CurveRow>& rows, const SimulationConfig& config,
                       const std::string& manifest_name);

struct CompareRow {
  double snr_db = 0.0;
  Protocol protocol = Protocol::nth_best_genie;
  std::string quantity;  ///< ber_dest or p_out
  double simulated = 0.0;
  double analytic = 0.0;
  double sigma = 0.0;  ///< binomial sigma at the analytic value
  double z = 0.0;
  bool gated = false;  ///< analytic value large enough to be checked
  bool pass = true;
};

struct CompareOptions {
  double z_max = 3.0;
  double min_probability = 1e-5;
};

std::vector<CompareRow> compare_records(const std::vector<SweepRecord>& records,
                                        const CompareOptions& opts = {});
bool all_pass(const std::vector<CompareRow>& rows);
std::string compare_csv(const std::vector<CompareRow>& rows, const SimulationConfig& config,
                        const std::string& manifest_name);

/// Writes `content` to `path` and the sidecar `<path>.manifest.json` with the
/// config echo, version, seed, timestamp and output paths. Returns the sidecar path.
std::filesystem::path write_with_manifest(const std::filesystem::path& path,
                                          const std::string& content,
                                          const SimulationConfig& config,
                                          const std::string& command);

/// Sidecar filename for an output path.
std::string manifest_name_for(const std::filesystem::path& path);

}  // namespace imprelay
