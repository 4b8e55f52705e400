#include "imprelay/state_detector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace imprelay {

namespace {

constexpr std::size_t kG = 0;
constexpr std::size_t kB = 1;

// ln cosh(z) without overflow.
double log_cosh(double z) {
  const double a = std::fabs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

void normalise(std::array<double, 2>& v, std::size_t k, const char* which) {
  const double sum = v[kG] + v[kB];
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw NumericalError(std::string("state detector: ") + which +
                         " recursion degenerated at epoch " + std::to_string(k));
  }
  v[kG] /= sum;
  v[kB] /= sum;
}

void check_lengths(std::span<const Complex> y, std::span<const Complex> h) {
  if (y.size() != h.size()) throw DomainError("state detector: y and h differ in length");
  if (y.empty()) throw DomainError("state detector: empty frame");
}

}  // namespace

double symbol_marginal_loglik(Complex y, Complex a, double variance) {
  const double energy = std::norm(y) + std::norm(a);
  const double corr = (std::conj(a) * y).real();
  return -std::log(std::numbers::pi * variance) - energy / variance +
         log_cosh(2.0 * corr / variance);
}

NoiseState llr_to_state(double llr) {
  if (std::isnan(llr)) throw DomainError("llr_to_state: NaN log-likelihood ratio");
  return llr >= 0.0 ? NoiseState::good : NoiseState::bad;
}

StateDetector::StateDetector(DetectorKind kind, const TsmgParams& params, double p_s)
    : kind_(kind),
      params_(params),
      amp_(std::sqrt(p_s)),
      log_prior_ratio_(std::log(params.p_good()) - std::log(params.p_bad())) {}

void StateDetector::emissions(std::span<const Complex> y, std::span<const Complex> h) {
  const std::size_t n = y.size();
  loglik_.resize(n);
  const double var_g = params_.variance(NoiseState::good);
  const double var_b = params_.variance(NoiseState::bad);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex a = amp_ * h[k];
    loglik_[k] = {symbol_marginal_loglik(y[k], a, var_g), symbol_marginal_loglik(y[k], a, var_b)};
    if (!std::isfinite(loglik_[k][kG]) || !std::isfinite(loglik_[k][kB])) {
      throw NumericalError("state detector: non-finite likelihood at epoch " + std::to_string(k));
    }
  }
}

void StateDetector::forward_backward(std::size_t n) {
  const double t_gg = 1.0 - params_.p_gb;
  const double t_gb = params_.p_gb;
  const double t_bg = params_.p_bg;
  const double t_bb = 1.0 - params_.p_bg;

  // Emissions scaled by the per-epoch maximum; the scale cancels in every
  // normalised quantity.
  emit_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double top = std::max(loglik_[k][kG], loglik_[k][kB]);
    emit_[k] = {std::exp(loglik_[k][kG] - top), std::exp(loglik_[k][kB] - top)};
  }

  // alpha_k(s) = p(y_0..y_{k-1}, s_k), alpha_0 = stationary.
  alpha_.resize(n);
  alpha_[0] = {params_.p_good(), params_.p_bad()};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double g = alpha_[k][kG] * emit_[k][kG];
    const double b = alpha_[k][kB] * emit_[k][kB];
    alpha_[k + 1] = {g * t_gg + b * t_bg, g * t_gb + b * t_bb};
    normalise(alpha_[k + 1], k + 1, "forward");
  }

  // beta_k(s) = p(y_k..y_{K-1} | s_k), beta_K = 1.
  beta_.resize(n);
  std::array<double, 2> next{1.0, 1.0};
  for (std::size_t k = n; k-- > 0;) {
    beta_[k] = {emit_[k][kG] * (t_gg * next[kG] + t_gb * next[kB]),
                emit_[k][kB] * (t_bg * next[kG] + t_bb * next[kB])};
    normalise(beta_[k], k, "backward");
    next = beta_[k];
  }
}

void StateDetector::detect(std::span<const Complex> y, std::span<const Complex> h,
                           std::span<NoiseState> out) {
  check_lengths(y, h);
  if (kind_ == DetectorKind::genie) {
    throw DomainError("genie detection needs the true states, not the received frame");
  }
  emissions(y, h);
  const std::size_t n = y.size();
  if (kind_ == DetectorKind::memoryless) {
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = llr_to_state(log_prior_ratio_ + loglik_[k][kG] - loglik_[k][kB]);
    }
    return;
  }
  forward_backward(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double llr = std::log(alpha_[k][kG]) + std::log(beta_[k][kG]) -
                       std::log(alpha_[k][kB]) - std::log(beta_[k][kB]);
    if (std::isnan(llr)) {
      throw NumericalError("state detector: zero posterior mass at epoch " + std::to_string(k));
    }
    out[k] = llr_to_state(llr);
  }
}

TrellisPosteriors StateDetector::run(std::span<const Complex> y, std::span<const Complex> h) {
  check_lengths(y, h);
  emissions(y, h);
  const std::size_t n = y.size();
  TrellisPosteriors post;
  post.posterior.resize(n);
  post.llr.resize(n);

  if (kind_ == DetectorKind::memoryless) {
    post.alpha.assign(n, {params_.p_good(), params_.p_bad()});
    post.beta.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double top = std::max(loglik_[k][kG], loglik_[k][kB]);
      post.beta[k] = {std::exp(loglik_[k][kG] - top), std::exp(loglik_[k][kB] - top)};
      normalise(post.beta[k], k, "likelihood");
      post.llr[k] = log_prior_ratio_ + loglik_[k][kG] - loglik_[k][kB];
      std::array<double, 2> p{params_.p_good() * post.beta[k][kG],
                              params_.p_bad() * post.beta[k][kB]};
      normalise(p, k, "posterior");
      post.posterior[k] = p;
    }
    return post;
  }
  if (kind_ == DetectorKind::genie) {
    throw DomainError("genie detection has no trellis");
  }

  forward_backward(n);
  post.alpha = alpha_;
  post.beta = beta_;
  for (std::size_t k = 0; k < n; ++k) {
    std::array<double, 2> p{alpha_[k][kG] * beta_[k][kG], alpha_[k][kB] * beta_[k][kB]};
    normalise(p, k, "posterior");
    post.posterior[k] = p;
    post.llr[k] = std::log(alpha_[k][kG]) + std::log(beta_[k][kG]) - std::log(alpha_[k][kB]) -
                  std::log(beta_[k][kB]);
  }
  return post;
}

TrellisPosteriors map_posteriors(std::span<const Complex> y, std::span<const Complex> h,
                                 double p_s, const TsmgParams& params) {
  return StateDetector(DetectorKind::map, params, p_s).run(y, h);
}

TrellisPosteriors memoryless_posteriors(std::span<const Complex> y,
                                        std::span<const Complex> h, double p_s,
                                        const TsmgParams& params) {
  return StateDetector(DetectorKind::memoryless, params, p_s).run(y, h);
}

DetectedStates hard_decisions(const TrellisPosteriors& post, DetectorKind source) {
  DetectedStates out;
  out.source = source;
  out.states.reserve(post.llr.size());
  for (double l : post.llr) out.states.push_back(llr_to_state(l));
  return out;
}

DetectedStates genie_states(const FrameTrace& trace, std::size_t relay) {
  if (relay >= trace.relays()) throw DomainError("genie_states: relay index out of range");
  return {trace.states[relay], DetectorKind::genie};
}

}  // namespace imprelay
