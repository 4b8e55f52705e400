#pragma once

#include <array>
#include <span>
#include <vector>

#include "imprelay/noise_channel.hpp"

namespace imprelay {

enum class DetectorKind { genie, map, memoryless };

/// Per-epoch trellis quantities for one relay frame. Index 0 of each pair is
/// state G, index 1 is state B. alpha and beta are stored after per-step
/// normalisation (each pair sums to 1).
struct TrellisPosteriors {
  std::vector<std::array<double, 2>> alpha;
  std::vector<std::array<double, 2>> beta;
  std::vector<std::array<double, 2>> posterior;
  std::vector<double> llr;  ///< ln(P(G|y) / P(B|y)); may be +/-inf
};

struct DetectedStates {
  StateSequence states;
  DetectorKind source = DetectorKind::genie;
};

/// log p(y | s) with the equiprobable BPSK symbol marginalised out:
///   ln( 1/2 sum_x exp(-|y - a x|^2 / var) / (pi var) ),  a = sqrt(P_S) h.
double symbol_marginal_loglik(Complex y, Complex a, double variance);

/// Forward-backward posterior of the TSMG state at each epoch. Throws
/// NumericalError if the recursion degenerates.
TrellisPosteriors map_posteriors(std::span<const Complex> y, std::span<const Complex> h,
                                 double p_s, const TsmgParams& params);

/// Sample-by-sample posterior under the stationary prior (no coupling in k).
TrellisPosteriors memoryless_posteriors(std::span<const Complex> y,
                                        std::span<const Complex> h, double p_s,
                                        const TsmgParams& params);

/// G if llr >= 0, else B. Throws DomainError on NaN.
NoiseState llr_to_state(double llr);

DetectedStates hard_decisions(const TrellisPosteriors& post, DetectorKind source);

/// The true state sequence of `relay`, verbatim.
DetectedStates genie_states(const FrameTrace& trace, std::size_t relay);

/// Reusable detector for the simulation hot path: keeps its buffers between
/// frames and only emits hard decisions.
class StateDetector {
 public:
  StateDetector(DetectorKind kind, const TsmgParams& params, double p_s);

  DetectorKind kind() const { return kind_; }

  /// Hard decisions for one relay frame. `out` must have y.size() entries.
  void detect(std::span<const Complex> y, std::span<const Complex> h,
              std::span<NoiseState> out);

  /// Full trellis output for the last frame passed to `detect` (MAP/memoryless).
  TrellisPosteriors run(std::span<const Complex> y, std::span<const Complex> h);

 private:
  void emissions(std::span<const Complex> y, std::span<const Complex> h);
  void forward_backward(std::size_t length);

  DetectorKind kind_;
  TsmgParams params_;
  double amp_;
  double log_prior_ratio_;
  std::vector<std::array<double, 2>> loglik_;
  std::vector<std::array<double, 2>> emit_;
  std::vector<std::array<double, 2>> alpha_;
  std::vector<std::array<double, 2>> beta_;
};

}  // namespace imprelay
