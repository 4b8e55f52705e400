#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "imprelay/types.hpp"

namespace imprelay {

/// Two-state Markov-Gaussian noise: a G/B Markov chain whose state selects the
/// variance of a circularly-symmetric complex Gaussian sample (sigma_g2 in G,
/// rho * sigma_g2 in B).
struct TsmgParams {
  double p_gb = 0.0;  ///< P(G -> B) per epoch
  double p_bg = 1.0;  ///< P(B -> G) per epoch
  double rho = 1.0;   ///< sigma_B^2 / sigma_G^2
  double sigma_g2 = 1.0;

  /// Validated construction from the raw chain. Transition probabilities may
  /// touch 0 or 1 (absorbing chains are useful in tests) but not both be 0.
  static TsmgParams from_transitions(double p_gb, double p_bg, double rho,
                                     double sigma_g2);
  /// Construction from stationary bad-state probability and memory mu.
  static TsmgParams from_stationary(double p_b, double mu, double rho,
                                    double sigma_g2);

  double p_good() const { return p_bg / (p_gb + p_bg); }
  double p_bad() const { return p_gb / (p_gb + p_bg); }
  double memory() const { return 1.0 / (p_gb + p_bg); }
  double variance(NoiseState s) const {
    return s == NoiseState::good ? sigma_g2 : rho * sigma_g2;
  }
  TsmgParams with_sigma_g2(double sigma2) const;
};

struct TransitionProbs {
  double p_gb;
  double p_bg;
};

/// Inverts p_B = p_GB/(p_GB+p_BG), mu = 1/(p_GB+p_BG).
/// Throws DomainError when the pair is infeasible.
TransitionProbs derive_transition_probs(double p_b, double mu);

/// Node geometry. Relays share one distance profile; lambda_rd defaults to the
/// collinear value lambda_sd - lambda_sr.
struct Topology {
  int relays = 5;
  double lambda_sd = 1.0;
  double lambda_sr = 0.4;
  double lambda_rd = 0.6;
  double eta = 2.0;
  double p_s = 1.0;
  double p_n = 1.0;

  static Topology collinear(int relays, double lambda_sd, double lambda_sr,
                            double eta);
  void validate() const;

  double omega_sd() const;
  double omega_sr() const;
  double omega_rd() const;
};

/// Average per-link SNRs plus the derived harmonic scale and the bad-state
/// source-relay SNR.
struct AvgSnrSet {
  double g_sr = 0.0;
  double g_rd = 0.0;
  double g_sd = 0.0;
  double g_a = 0.0;       ///< g_sr * g_rd / (g_sr + g_rd)
  double g_sr_bad = 0.0;  ///< g_sr / rho

  static AvgSnrSet make(double g_sr, double g_rd, double g_sd, double rho = 1.0);
};

AvgSnrSet average_snrs(const Topology& topo, const TsmgParams& noise);

enum class ChannelMode { per_symbol, quasi_static };

/// Channel and noise realisation of one frame for every link. Relay-indexed
/// arrays are `relays` vectors of `length` samples each.
struct FrameTrace {
  std::size_t length = 0;
  std::vector<std::vector<Complex>> h_sr;
  std::vector<std::vector<Complex>> h_rd;
  std::vector<Complex> h_sd;
  std::vector<StateSequence> states;
  std::vector<std::vector<Complex>> n_sr;  ///< TSMG noise at each relay
  std::vector<Complex> n_sd;               ///< AWGN at the destination, source slot
  std::vector<Complex> n_rd;               ///< AWGN at the destination, relay slot

  std::size_t relays() const { return h_sr.size(); }
};

StateSequence sample_state_sequence(const TsmgParams& params, std::size_t length,
                                    Rng& rng);
void sample_state_sequence(const TsmgParams& params, Rng& rng,
                           std::span<NoiseState> out);

std::vector<Complex> sample_tsmg_noise(std::span<const NoiseState> states,
                                       const TsmgParams& params, Rng& rng);
void sample_tsmg_noise(std::span<const NoiseState> states, const TsmgParams& params,
                       Rng& rng, std::span<Complex> out);

/// I.i.d. CSCG gains with E|h|^2 = omega.
std::vector<Complex> sample_fading(double omega, std::size_t length, Rng& rng);
void sample_fading(double omega, ChannelMode mode, Rng& rng, std::span<Complex> out);

/// One CSCG draw with total complex variance `variance`.
Complex sample_cscg(double variance, Rng& rng);

/// Fills `trace` (reusing its storage) with one frame. Draw order is fixed:
/// states, SR gains, RD gains, SD gain, relay noise, destination noise.
void sample_frame_trace(const Topology& topo, const TsmgParams& noise,
                        std::size_t length, ChannelMode mode, Rng& rng,
                        FrameTrace& trace);

}  // namespace imprelay
