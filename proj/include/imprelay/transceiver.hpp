#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imprelay/relay_selector.hpp"

namespace imprelay {

/// 0 -> +1, 1 -> -1.
inline double bpsk_map(int bit) { return bit == 0 ? 1.0 : -1.0; }

/// Sign decision on a real metric; a zero metric decides 0.
inline int bpsk_decide(double metric) { return metric >= 0.0 ? 0 : 1; }

/// Coherent matched-filter decision at a relay: sign of Re(conj(h) y).
int relay_decode(Complex y, Complex h);

/// MRC metric for two branches with equal noise variance. Pass effective
/// gains (sqrt(P) h) when the branch powers differ.
double mrc_combine(Complex y_sd, Complex h_sd, Complex y_rd, Complex h_rd);

struct EpochOutcome {
  bool relay_bit_error = false;
  bool dest_bit_error = false;
  bool outage_event = false;
  SelectionDecision decision;
};

struct FrameSetup {
  Topology topology;
  TsmgParams noise;
  Protocol protocol = Protocol::nth_best_map;
  FallbackRule fallback = FallbackRule::partial;
  std::size_t symbols = 1000;
  ChannelMode mode = ChannelMode::per_symbol;
  double phi = 3.0;  ///< outage threshold 2^(2R) - 1
  /// Relay forwards the source bit regardless of its own decision.
  bool force_correct_relay = false;
};

/// Simulates whole frames for one configuration. Holds scratch buffers, so one
/// instance per worker thread.
class FrameSimulator {
 public:
  explicit FrameSimulator(FrameSetup setup);

  const FrameSetup& setup() const { return setup_; }

  /// Runs frame `frame_index` of the run seeded by `master_seed`. Throws
  /// NumericalError when state detection degenerates; the caller counts the
  /// frame as failed.
  void simulate(std::uint64_t master_seed, std::uint64_t frame_index,
                std::vector<EpochOutcome>& out);

  /// Trace of the last simulated frame.
  const FrameTrace& trace() const { return trace_; }

 private:
  FrameSetup setup_;
  std::optional<StateDetector> detector_;
  FrameTrace trace_;
  std::vector<int> bits_;
  std::vector<std::vector<Complex>> y_sr_;
  std::vector<StateSequence> detected_;
  std::vector<double> g_sr_, g_rd_;
  StateSequence epoch_states_;
  RankingTable ranking_;
};

}  // namespace imprelay
