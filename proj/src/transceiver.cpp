#include "imprelay/transceiver.hpp"

#include <cmath>

namespace imprelay {

int relay_decode(Complex y, Complex h) { return bpsk_decide((std::conj(h) * y).real()); }

double mrc_combine(Complex y_sd, Complex h_sd, Complex y_rd, Complex h_rd) {
  return (std::conj(h_sd) * y_sd + std::conj(h_rd) * y_rd).real();
}

FrameSimulator::FrameSimulator(FrameSetup setup) : setup_(std::move(setup)) {
  setup_.topology.validate();
  if (setup_.symbols < 1) throw DomainError("K (symbols per frame) must be >= 1");
  if (!(setup_.phi > 0.0)) throw DomainError("outage threshold phi must be positive");
  if (const auto kind = detector_for(setup_.protocol);
      kind && *kind != DetectorKind::genie) {
    detector_.emplace(*kind, setup_.noise, setup_.topology.p_s);
  }
}

void FrameSimulator::simulate(std::uint64_t master_seed, std::uint64_t frame_index,
                              std::vector<EpochOutcome>& out) {
  const std::size_t k_len = setup_.symbols;
  const auto m = static_cast<std::size_t>(setup_.topology.relays);
  const double amp_s = std::sqrt(setup_.topology.p_s);
  const double amp_n = std::sqrt(setup_.topology.p_n);
  const double s2 = setup_.noise.sigma_g2;
  const double rho = setup_.noise.rho;

  Rng channel = make_substream(master_seed, frame_index, 0);
  bits_.resize(k_len);
  for (auto& b : bits_) b = static_cast<int>(channel() >> 63);
  sample_frame_trace(setup_.topology, setup_.noise, k_len, setup_.mode, channel, trace_);

  const auto received = [&](std::size_t r, std::size_t k) {
    return amp_s * trace_.h_sr[r][k] * bpsk_map(bits_[k]) + trace_.n_sr[r][k];
  };

  const bool nth_best = detector_for(setup_.protocol).has_value();
  if (detector_) {
    y_sr_.resize(m);
    detected_.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
      y_sr_[r].resize(k_len);
      for (std::size_t k = 0; k < k_len; ++k) y_sr_[r][k] = received(r, k);
      detected_[r].resize(k_len);
      detector_->detect(y_sr_[r], trace_.h_sr[r], detected_[r]);
    }
  }
  const auto& states = detector_ ? detected_ : trace_.states;

  std::optional<Rng> protocol_rng;
  if (setup_.protocol == Protocol::random) {
    protocol_rng.emplace(make_substream(master_seed, frame_index, 1));
  }

  out.resize(k_len);
  g_sr_.resize(m);
  g_rd_.resize(m);
  epoch_states_.resize(m);
  for (std::size_t k = 0; k < k_len; ++k) {
    for (std::size_t r = 0; r < m; ++r) {
      g_sr_[r] = setup_.topology.p_s * std::norm(trace_.h_sr[r][k]) / s2;
      g_rd_[r] = setup_.topology.p_n * std::norm(trace_.h_rd[r][k]) / s2;
    }
    rank_max_min(g_sr_, g_rd_, ranking_);

    SelectionDecision d;
    if (nth_best) {
      for (std::size_t r = 0; r < m; ++r) epoch_states_[r] = states[r][k];
      d = select_nth_best(ranking_, epoch_states_, g_sr_, g_rd_, rho, setup_.fallback);
      d.detector_source = detector_for(setup_.protocol);
    } else if (setup_.protocol == Protocol::conventional) {
      d = select_conventional(ranking_);
    } else {
      d = select_random(static_cast<int>(m), *protocol_rng);
      d.rank_used = ranking_.rank_of(d.relay);
    }

    const auto r = static_cast<std::size_t>(d.relay);
    const int bit = bits_[k];
    const int relay_bit = relay_decode(received(r, k), trace_.h_sr[r][k]);
    const int sent = setup_.force_correct_relay ? bit : relay_bit;

    const Complex a_sd = amp_s * trace_.h_sd[k];
    const Complex a_rd = amp_n * trace_.h_rd[r][k];
    const Complex y_sd = a_sd * bpsk_map(bit) + trace_.n_sd[k];
    const Complex y_rd = a_rd * bpsk_map(sent) + trace_.n_rd[k];
    const int dest_bit = bpsk_decide(mrc_combine(y_sd, a_sd, y_rd, a_rd));

    // Outage uses the SNR the selected relay actually experiences.
    const double g_srn =
        trace_.states[r][k] == NoiseState::bad ? g_sr_[r] / rho : g_sr_[r];
    const double g_sd = setup_.topology.p_s * std::norm(trace_.h_sd[k]) / s2;
    const double phi = setup_.phi;
    const bool outage =
        (g_srn >= phi && g_rd_[r] + g_sd < phi) || (g_srn < phi && g_sd < phi);

    out[k] = {relay_bit != bit, dest_bit != bit, outage, d};
  }
}

}  // namespace imprelay
