#include "imprelay/noise_channel.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <string>

namespace imprelay {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

double uniform(Rng& rng) { return boost::random::uniform_01<double>{}(rng); }

NoiseState draw_stationary(const TsmgParams& p, Rng& rng) {
  return uniform(rng) < p.p_bad() ? NoiseState::bad : NoiseState::good;
}

void fill_cscg(double variance, Rng& rng, std::span<Complex> out) {
  const double scale = std::sqrt(0.5 * variance);
  boost::random::normal_distribution<double> normal;
  for (auto& v : out) {
    const double re = normal(rng);
    const double im = normal(rng);
    v = {scale * re, scale * im};
  }
}

}  // namespace

Rng make_substream(std::uint64_t master_seed, std::uint64_t frame_index,
                   std::uint64_t stream) {
  const std::uint64_t a = splitmix64(master_seed);
  const std::uint64_t b = splitmix64(a ^ frame_index);
  const std::uint64_t c = splitmix64(b ^ (stream + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return Rng(seq);
}

TsmgParams TsmgParams::from_transitions(double p_gb, double p_bg, double rho,
                                        double sigma_g2) {
  require(p_gb >= 0.0 && p_gb <= 1.0, "p_GB must lie in [0, 1], got " + std::to_string(p_gb));
  require(p_bg >= 0.0 && p_bg <= 1.0, "p_BG must lie in [0, 1], got " + std::to_string(p_bg));
  require(p_gb + p_bg > 0.0, "p_GB + p_BG must be positive");
  require(rho >= 1.0, "rho must be >= 1, got " + std::to_string(rho));
  require(sigma_g2 > 0.0 && std::isfinite(sigma_g2),
          "sigma_G2 must be positive, got " + std::to_string(sigma_g2));
  return TsmgParams{p_gb, p_bg, rho, sigma_g2};
}

TsmgParams TsmgParams::from_stationary(double p_b, double mu, double rho,
                                       double sigma_g2) {
  const auto t = derive_transition_probs(p_b, mu);
  return from_transitions(t.p_gb, t.p_bg, rho, sigma_g2);
}

TsmgParams TsmgParams::with_sigma_g2(double sigma2) const {
  return from_transitions(p_gb, p_bg, rho, sigma2);
}

TransitionProbs derive_transition_probs(double p_b, double mu) {
  require(p_b > 0.0 && p_b < 1.0, "p_B must lie in (0, 1), got " + std::to_string(p_b));
  require(mu > 0.0 && std::isfinite(mu), "mu must be positive, got " + std::to_string(mu));
  const double p_gb = p_b / mu;
  const double p_bg = (1.0 - p_b) / mu;
  require(p_gb < 1.0 && p_bg < 1.0,
          "infeasible (p_B, mu): transition probabilities p_GB=" + std::to_string(p_gb) +
              ", p_BG=" + std::to_string(p_bg) + " must be < 1");
  return {p_gb, p_bg};
}

Topology Topology::collinear(int relays, double lambda_sd, double lambda_sr,
                             double eta) {
  Topology t;
  t.relays = relays;
  t.lambda_sd = lambda_sd;
  t.lambda_sr = lambda_sr;
  t.lambda_rd = lambda_sd - lambda_sr;
  t.eta = eta;
  t.validate();
  return t;
}

void Topology::validate() const {
  require(relays >= 1, "M (relays) must be >= 1");
  require(lambda_sd > 0.0, "lambda_SD must be positive");
  require(lambda_sr > 0.0, "lambda_SR must be positive");
  require(lambda_rd > 0.0, "lambda_RD must be positive (collinear default is lambda_SD - lambda_SR)");
  require(eta > 0.0, "eta must be positive");
  require(p_s > 0.0 && p_n > 0.0, "transmit powers must be positive");
}

double Topology::omega_sd() const { return std::pow(lambda_sd, -eta); }
double Topology::omega_sr() const { return std::pow(lambda_sr, -eta); }
double Topology::omega_rd() const { return std::pow(lambda_rd, -eta); }

AvgSnrSet AvgSnrSet::make(double g_sr, double g_rd, double g_sd, double rho) {
  require(g_sr > 0.0 && g_rd > 0.0 && g_sd > 0.0, "average SNRs must be positive");
  require(rho >= 1.0, "rho must be >= 1");
  AvgSnrSet s;
  s.g_sr = g_sr;
  s.g_rd = g_rd;
  s.g_sd = g_sd;
  s.g_a = g_sr * g_rd / (g_sr + g_rd);
  s.g_sr_bad = g_sr / rho;
  return s;
}

AvgSnrSet average_snrs(const Topology& topo, const TsmgParams& noise) {
  topo.validate();
  const double s2 = noise.sigma_g2;
  return AvgSnrSet::make(topo.p_s * topo.omega_sr() / s2, topo.p_n * topo.omega_rd() / s2,
                         topo.p_s * topo.omega_sd() / s2, noise.rho);
}

Complex sample_cscg(double variance, Rng& rng) {
  boost::random::normal_distribution<double> normal;
  const double scale = std::sqrt(0.5 * variance);
  const double re = normal(rng);
  const double im = normal(rng);
  return {scale * re, scale * im};
}

void sample_state_sequence(const TsmgParams& params, Rng& rng,
                           std::span<NoiseState> out) {
  if (out.empty()) return;
  NoiseState s = draw_stationary(params, rng);
  out[0] = s;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const double leave = s == NoiseState::good ? params.p_gb : params.p_bg;
    if (uniform(rng) < leave) s = s == NoiseState::good ? NoiseState::bad : NoiseState::good;
    out[k] = s;
  }
}

StateSequence sample_state_sequence(const TsmgParams& params, std::size_t length,
                                    Rng& rng) {
  require(length >= 1, "state sequence length must be >= 1");
  StateSequence out(length);
  sample_state_sequence(params, rng, out);
  return out;
}

void sample_tsmg_noise(std::span<const NoiseState> states, const TsmgParams& params,
                       Rng& rng, std::span<Complex> out) {
  const double sg = std::sqrt(0.5 * params.variance(NoiseState::good));
  const double sb = std::sqrt(0.5 * params.variance(NoiseState::bad));
  boost::random::normal_distribution<double> normal;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double scale = states[k] == NoiseState::good ? sg : sb;
    const double re = normal(rng);
    const double im = normal(rng);
    out[k] = {scale * re, scale * im};
  }
}

std::vector<Complex> sample_tsmg_noise(std::span<const NoiseState> states,
                                       const TsmgParams& params, Rng& rng) {
  std::vector<Complex> out(states.size());
  sample_tsmg_noise(states, params, rng, out);
  return out;
}

void sample_fading(double omega, ChannelMode mode, Rng& rng, std::span<Complex> out) {
  require(omega > 0.0, "mean channel gain must be positive");
  if (out.empty()) return;
  if (mode == ChannelMode::quasi_static) {
    const Complex h = sample_cscg(omega, rng);
    for (auto& v : out) v = h;
    return;
  }
  fill_cscg(omega, rng, out);
}

std::vector<Complex> sample_fading(double omega, std::size_t length, Rng& rng) {
  std::vector<Complex> out(length);
  sample_fading(omega, ChannelMode::per_symbol, rng, out);
  return out;
}

void sample_frame_trace(const Topology& topo, const TsmgParams& noise,
                        std::size_t length, ChannelMode mode, Rng& rng,
                        FrameTrace& trace) {
  const auto m = static_cast<std::size_t>(topo.relays);
  trace.length = length;
  trace.h_sr.resize(m);
  trace.h_rd.resize(m);
  trace.states.resize(m);
  trace.n_sr.resize(m);
  trace.h_sd.resize(length);
  trace.n_sd.resize(length);
  trace.n_rd.resize(length);
  for (std::size_t r = 0; r < m; ++r) {
    trace.h_sr[r].resize(length);
    trace.h_rd[r].resize(length);
    trace.states[r].resize(length);
    trace.n_sr[r].resize(length);
  }

  for (std::size_t r = 0; r < m; ++r) sample_state_sequence(noise, rng, trace.states[r]);
  for (std::size_t r = 0; r < m; ++r) sample_fading(topo.omega_sr(), mode, rng, trace.h_sr[r]);
  for (std::size_t r = 0; r < m; ++r) sample_fading(topo.omega_rd(), mode, rng, trace.h_rd[r]);
  sample_fading(topo.omega_sd(), mode, rng, trace.h_sd);
  for (std::size_t r = 0; r < m; ++r) sample_tsmg_noise(trace.states[r], noise, rng, trace.n_sr[r]);

  // Destination links see AWGN only.
  fill_cscg(noise.sigma_g2, rng, trace.n_sd);
  fill_cscg(noise.sigma_g2, rng, trace.n_rd);
}

}  // namespace imprelay
