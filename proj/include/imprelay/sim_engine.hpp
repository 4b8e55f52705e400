#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imprelay/transceiver.hpp"

namespace imprelay {

struct SimulationConfig {
  Topology topology;
  double p_b = 0.01;
  double mu = 100.0;
  double rho = 100.0;
  double rate = 1.0;
  Protocol protocol = Protocol::nth_best_map;
  FallbackRule fallback = FallbackRule::partial;
  ChannelMode mode = ChannelMode::per_symbol;
  std::uint64_t frames = 20000;
  std::size_t symbols = 1000;
  std::vector<double> snr_db{0, 5, 10, 15, 20, 25, 30, 35, 40};
  std::uint64_t seed = 1;
  bool force_correct_relay = false;

  /// Throws ConfigError naming the offending symbol.
  void validate() const;

  double phi() const;
  /// Noise parameters at one grid point: sigma_G^2 = 10^(-snr/10), unit powers.
  TsmgParams noise_at(double snr_db) const;
};

struct Estimate {
  double p = 0.0;
  double ci = 0.0;  ///< 95% half-width; 3/n when no event was seen
};

Estimate estimate_with_ci(std::uint64_t events, std::uint64_t trials);

struct SweepRecord {
  double snr_db = 0.0;
  Protocol protocol = Protocol::nth_best_map;
  Estimate ber_relay;
  Estimate ber_dest;
  Estimate p_out;
  std::uint64_t bits = 0;  ///< epochs simulated; one bit each
  std::uint64_t relay_errors = 0;
  std::uint64_t dest_errors = 0;
  std::uint64_t outages = 0;
  std::uint64_t failed_frames = 0;
  double analytic_ber = 0.0;
  double analytic_ber_relay = 0.0;
  double analytic_pout = 0.0;
  double asym_ber = 0.0;
  double asym_pout = 0.0;
  std::uint64_t frames = 0;
  std::size_t symbols_per_frame = 0;
  std::uint64_t seed = 0;
};

/// Frame failures above this fraction abort the sweep.
inline constexpr double kMaxFrameFailureRate = 1e-3;

/// Fills the analytic and asymptotic columns of `rec` for the config.
void attach_analytic(const SimulationConfig& config, SweepRecord& rec);

/// Records with only the analytic columns filled (no simulation).
std::vector<SweepRecord> analytic_sweep(const SimulationConfig& config);

using PointCallback = std::function<void(const SweepRecord&)>;

/// Monte Carlo over the SNR grid. Frames are split into contiguous blocks
/// across `workers` threads; the result does not depend on `workers`.
std::vector<SweepRecord> run_sweep(const SimulationConfig& config, unsigned workers = 0,
                                   const PointCallback& on_point = {});

/// Single grid point; same contract as run_sweep.
SweepRecord run_point(const SimulationConfig& config, double snr_db, unsigned workers = 0);

/// Negated least-squares slope of log10(value) against snr_db / 10 over
/// points with snr_db in [lo_db, hi_db] and value > 0.
double fit_diversity_slope(std::span<const double> snr_db, std::span<const double> values,
                           double lo_db, double hi_db);

enum class Metric { ber_relay, ber_dest, p_out, analytic_ber, analytic_pout, asym_ber, asym_pout };

double metric_value(const SweepRecord& rec, Metric m);

double fit_diversity_slope(std::span<const SweepRecord> records, Metric metric, double lo_db,
                           double hi_db);

}  // namespace imprelay
