#include "imprelay/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

extern "C" {
#include <quadmath.h>
}

namespace imprelay::analytic {

namespace {

// Every closed form below is a linear functional applied to a combination of
// exponentials exp(-r x). Alternating binomial sums cancel heavily at high
// SNR (finite outage near 1e-23 is built from O(1) terms), so the sums run
// in binary128.
using quad = __float128;

constexpr double kConfluentTol = 1e-9;

class Accumulator {
 public:
  void add(quad v) {
    const quad t = sum_ + v;
    if (fabsq(sum_) >= fabsq(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  quad value() const { return sum_ + comp_; }

 private:
  quad sum_ = 0;
  quad comp_ = 0;
};

// Kernels: value and first two derivatives in the rate r.

struct DensityKernel {  // exp(-r x)
  quad x;
  quad operator()(quad r) const { return expq(-r * x); }
  quad d1(quad r) const { return -x * expq(-r * x); }
  quad d2(quad r) const { return x * x * expq(-r * x); }
};

struct CdfKernel {  // integral_0^x exp(-r t) dt = x E(r x), E(t) = (1 - e^-t) / t
  quad x;

  static quad e0(quad t) {
    if (t < 1) return series(t, 0);
    return -expm1q(-t) / t;
  }
  static quad e1(quad t) {
    if (t < 1) return series(t, 1);
    return ((1 + t) * expq(-t) - 1) / (t * t);
  }
  static quad e2(quad t) {
    if (t < 1) return series(t, 2);
    return (2 - (t * t + 2 * t + 2) * expq(-t)) / (t * t * t);
  }
  // d-th derivative of sum_n (-t)^n / (n+1)!.
  static quad series(quad t, int d) {
    quad total = 0;
    quad fact = 1;  // (n+1)!
    for (int n = 0; n < 48; ++n) {
      fact *= n + 1;
      if (n < d) continue;
      quad falling = 1;
      for (int j = 0; j < d; ++j) falling *= n - j;
      total += (n % 2 == 0 ? 1 : -1) * falling * powq(t, n - d) / fact;
    }
    return total;
  }

  quad operator()(quad r) const { return x * e0(r * x); }
  quad d1(quad r) const { return x * x * e1(r * x); }
  quad d2(quad r) const { return x * x * x * e2(r * x); }
};

struct BerKernel {  // 1/2 int erfc(sqrt(x)) r e^{-r x} dx / r = 1 / (2 (1 + r + sqrt(1 + r)))
  static quad den(quad r) { return 1 + r + sqrtq(1 + r); }
  static quad den1(quad r) { return 1 + 1 / (2 * sqrtq(1 + r)); }
  static quad den2(quad r) { return -1 / (4 * (1 + r) * sqrtq(1 + r)); }
  quad operator()(quad r) const { return 1 / (2 * den(r)); }
  quad d1(quad r) const {
    const quad d = den(r);
    return -den1(r) / (2 * d * d);
  }
  quad d2(quad r) const {
    const quad d = den(r);
    const quad d1v = den1(r);
    return (2 * d1v * d1v - d * den2(r)) / (2 * d * d * d);
  }
};

struct MeanKernel {  // integral_0^inf x e^{-r x} dx
  quad operator()(quad r) const { return 1 / (r * r); }
  quad d1(quad r) const { return -2 / (r * r * r); }
  quad d2(quad r) const { return 6 / (r * r * r * r); }
};

bool confluent(quad a, quad b) {
  const quad scale = fmaxq(fabsq(a), fabsq(b));
  return fabsq(b - a) <= kConfluentTol * scale;
}

template <class K>
quad divdiff(const K& k, quad a, quad b) {
  if (confluent(a, b)) return k.d1((a + b) / 2);
  return (k(b) - k(a)) / (b - a);
}

template <class K>
quad divdiff(const K& k, quad a, quad b, quad c) {
  quad p[3] = {a, b, c};
  std::sort(p, p + 3, [](quad u, quad v) { return u < v; });
  if (confluent(p[0], p[2])) return k.d2((p[0] + p[1] + p[2]) / 3) / 2;
  return (divdiff(k, p[1], p[2]) - divdiff(k, p[0], p[1])) / (p[2] - p[0]);
}

quad binomial(int n, int k) {
  quad c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

struct Rates {
  quad sr, rd, sd, bad;
  explicit Rates(const AvgSnrSet& s)
      : sr(1 / static_cast<quad>(s.g_sr)),
        rd(1 / static_cast<quad>(s.g_rd)),
        sd(1 / static_cast<quad>(s.g_sd)),
        bad(1 / static_cast<quad>(s.g_sr_bad)) {}
};

void check_snrs(const AvgSnrSet& s) {
  for (double g : {s.g_sr, s.g_rd, s.g_sd, s.g_sr_bad}) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw DomainError("average SNRs must be positive and finite");
    }
  }
}

void check_relays(int relays) {
  if (relays < 1 || relays > kMaxRelays) {
    throw DomainError("M must lie in [1, " + std::to_string(kMaxRelays) + "], got " +
                      std::to_string(relays));
  }
}

void check_rank(int relays, int rank) {
  check_relays(relays);
  if (rank < 1 || rank > relays) {
    throw DomainError("N must lie in [1, M], got N=" + std::to_string(rank) +
                      " with M=" + std::to_string(relays));
  }
}

void check_x(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("SNR argument must be finite and >= 0");
}

void check_phi(double phi) {
  if (!(phi > 0.0) || !std::isfinite(phi)) throw DomainError("phi must be positive and finite");
}

void check_pb(double p_b) {
  if (!(p_b >= 0.0 && p_b < 1.0)) {
    throw DomainError("p_B must lie in [0, 1), got " + std::to_string(p_b));
  }
}

double finish(quad v, const char* what) {
  const auto d = static_cast<double>(v);
  if (!std::isfinite(d)) throw NumericalError(std::string(what) + ": non-finite result");
  return d;
}

// Probabilities: clamp rounding residue at the ends of [0, 1].
double finish_prob(quad v, const char* what) {
  return std::clamp(finish(v, what), 0.0, 1.0);
}

// Functional of the N'th-best hop density. `near` is the rate of the hop being
// described, `far` the other hop: the SR_N density is (near=sr, far=rd).
template <class K>
quad nth_hop(const K& k, int m, int n, quad near, quad far) {
  const quad c = m * binomial(m - 1, n - 1);
  const quad ra1 = near + far;  // 1 / gamma_a
  Accumulator acc;
  for (int j = 0; j <= m - n; ++j) {
    const quad b = binomial(m - n, j) * (j % 2 == 0 ? 1 : -1);
    const quad ra = (j + n) * ra1;
    acc.add(b * c * near * far * -divdiff(k, near, ra));
    acc.add(b * c * near * k(ra));
  }
  return acc.value();
}

// Functional of gamma_{R_N D} + gamma_SD.
template <class K>
quad nth_combined(const K& k, int m, int n, const Rates& r) {
  const quad c = m * binomial(m - 1, n - 1);
  const quad ra1 = r.sr + r.rd;
  const quad s = r.sd;
  Accumulator acc;
  for (int j = 0; j <= m - n; ++j) {
    const quad b = binomial(m - n, j) * (j % 2 == 0 ? 1 : -1);
    const quad ra = (j + n) * ra1;
    acc.add(b * c * r.sr * r.rd * s * divdiff(k, s, r.rd, ra));
    acc.add(b * c * r.rd * s * -divdiff(k, s, ra));
  }
  return acc.value();
}

// Functional of the max of M i.i.d. exponentials with rate `rb`.
template <class K>
quad max_of(const K& k, int m, quad rb) {
  Accumulator acc;
  for (int j = 0; j <= m - 1; ++j) {
    const quad b = binomial(m - 1, j) * (j % 2 == 0 ? 1 : -1);
    acc.add(m * rb * b * k((j + 1) * rb));
  }
  return acc.value();
}

// Functional of the sum of two independent exponentials with rates a, b.
template <class K>
quad sum_of_two(const K& k, quad a, quad b) {
  return a * b * -divdiff(k, a, b);
}

quad exp_cdf(quad rate, quad x) { return -expm1q(-rate * x); }

// Weights of the rank actually used: (1 - p_B) p_B^(N-1), and p_B^M for all-bad.
template <class Good, class Bad>
double weighted(int relays, double p_b, Good good, Bad bad, const char* what,
                bool probability = true) {
  check_pb(p_b);
  Accumulator acc;
  const quad pb = p_b;
  quad w = 1 - pb;
  for (int n = 1; n <= relays; ++n) {
    acc.add(w * static_cast<quad>(good(n)));
    w *= pb;
  }
  quad all_bad = 1;
  for (int n = 0; n < relays; ++n) all_bad *= pb;
  if (all_bad > 0) acc.add(all_bad * static_cast<quad>(bad()));
  return probability ? finish_prob(acc.value(), what) : finish(acc.value(), what);
}

}  // namespace

double omega(double theta) {
  if (!(theta >= 0.0)) throw DomainError("omega: theta must be >= 0");
  if (std::isinf(theta)) return 0.0;
  // Rationalised form; no cancellation as theta -> 0.
  return 1.0 / (2.0 * (1.0 + theta + std::sqrt(1.0 + theta)));
}

double chi(double a, double x) {
  if (!(a > 0.0)) throw DomainError("chi: a must be positive");
  if (!(x >= 0.0)) throw DomainError("chi: x must be >= 0");
  return -a * std::expm1(-x / a);
}

double rate_threshold(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("R must be positive");
  return std::exp2(2.0 * rate) - 1.0;
}

int diversity_order(int relays, int rank) {
  check_rank(relays, rank);
  return relays - rank + 2;
}

double pdf_gamma_sr_n(double x, int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  check_x(x);
  const Rates r(s);
  return std::max(0.0, finish(nth_hop(DensityKernel{x}, relays, rank, r.sr, r.rd), "pdf_gamma_sr_n"));
}

double cdf_gamma_sr_n(double x, int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  check_x(x);
  const Rates r(s);
  return finish_prob(nth_hop(CdfKernel{x}, relays, rank, r.sr, r.rd), "cdf_gamma_sr_n");
}

double pdf_gamma_rd_n(double x, int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  check_x(x);
  const Rates r(s);
  return std::max(0.0, finish(nth_hop(DensityKernel{x}, relays, rank, r.rd, r.sr), "pdf_gamma_rd_n"));
}

double cdf_gamma_rd_n(double x, int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  check_x(x);
  const Rates r(s);
  return finish_prob(nth_hop(CdfKernel{x}, relays, rank, r.rd, r.sr), "cdf_gamma_rd_n");
}

double pdf_gamma_srnd(double x, int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  check_x(x);
  return std::max(0.0, finish(nth_combined(DensityKernel{x}, relays, rank, Rates(s)), "pdf_gamma_srnd"));
}

double cdf_gamma_srnd(double x, int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  check_x(x);
  return finish_prob(nth_combined(CdfKernel{x}, relays, rank, Rates(s)), "cdf_gamma_srnd");
}

double pdf_gamma_sr_bad(double x, int relays, const AvgSnrSet& s) {
  check_relays(relays);
  check_snrs(s);
  check_x(x);
  return std::max(0.0, finish(max_of(DensityKernel{x}, relays, Rates(s).bad), "pdf_gamma_sr_bad"));
}

double cdf_gamma_sr_bad(double x, int relays, const AvgSnrSet& s) {
  check_relays(relays);
  check_snrs(s);
  check_x(x);
  return finish_prob(max_of(CdfKernel{x}, relays, Rates(s).bad), "cdf_gamma_sr_bad");
}

double mean_gamma_rd_n(int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  const Rates r(s);
  return finish(nth_hop(MeanKernel{}, relays, rank, r.rd, r.sr), "mean_gamma_rd_n");
}

double ber_mrc_two_branch(double g1, double g2) {
  if (!(g1 > 0.0) || !(g2 > 0.0)) throw DomainError("branch SNRs must be positive");
  return finish_prob(sum_of_two(BerKernel{}, 1 / static_cast<quad>(g1), 1 / static_cast<quad>(g2)),
                     "ber_mrc_two_branch");
}

BerBreakdown ber_nth_good(int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  const Rates r(s);
  const quad relay = nth_hop(BerKernel{}, relays, rank, r.sr, r.rd);
  const quad ner = nth_combined(BerKernel{}, relays, rank, r);
  const quad mean_rd = nth_hop(MeanKernel{}, relays, rank, r.rd, r.sr);
  const quad er = mean_rd / (mean_rd + static_cast<quad>(s.g_sd));
  BerBreakdown out;
  out.relay = finish_prob(relay, "ber_nth_good");
  out.dest_no_error = finish_prob(ner, "ber_nth_good");
  out.dest_error = finish_prob(er, "ber_nth_good");
  out.dest = finish_prob(relay * er + (1 - relay) * ner, "ber_nth_good");
  return out;
}

BerBreakdown ber_bad_state(int relays, const AvgSnrSet& s) {
  check_relays(relays);
  check_snrs(s);
  const Rates r(s);
  const quad relay = max_of(BerKernel{}, relays, r.bad);
  const quad ner = sum_of_two(BerKernel{}, r.sd, r.rd);
  const quad er = static_cast<quad>(s.g_rd) / (static_cast<quad>(s.g_rd) + s.g_sd);
  BerBreakdown out;
  out.relay = finish_prob(relay, "ber_bad_state");
  out.dest_no_error = finish_prob(ner, "ber_bad_state");
  out.dest_error = finish_prob(er, "ber_bad_state");
  out.dest = finish_prob(relay * er + (1 - relay) * ner, "ber_bad_state");
  return out;
}

double ber_overall(int relays, const AvgSnrSet& s, double p_b) {
  check_relays(relays);
  return weighted(
      relays, p_b, [&](int n) { return ber_nth_good(relays, n, s).dest; },
      [&] { return ber_bad_state(relays, s).dest; }, "ber_overall");
}

double ber_relay_overall(int relays, const AvgSnrSet& s, double p_b) {
  check_relays(relays);
  return weighted(
      relays, p_b, [&](int n) { return ber_nth_good(relays, n, s).relay; },
      [&] { return ber_bad_state(relays, s).relay; }, "ber_relay_overall");
}

OutageBreakdown outage_nth_good(int relays, int rank, const AvgSnrSet& s, double phi) {
  check_rank(relays, rank);
  check_snrs(s);
  check_phi(phi);
  const Rates r(s);
  const quad f_sr = nth_hop(CdfKernel{phi}, relays, rank, r.sr, r.rd);
  const quad f_comb = nth_combined(CdfKernel{phi}, relays, rank, r);
  const quad f_sd = exp_cdf(r.sd, phi);
  OutageBreakdown out;
  out.f_sr = finish_prob(f_sr, "outage_nth_good");
  out.f_comb = finish_prob(f_comb, "outage_nth_good");
  out.f_sd = finish_prob(f_sd, "outage_nth_good");
  out.p_out = finish_prob((1 - f_sr) * f_comb + f_sr * f_sd, "outage_nth_good");
  return out;
}

OutageBreakdown outage_bad_state(int relays, const AvgSnrSet& s, double phi) {
  check_relays(relays);
  check_snrs(s);
  check_phi(phi);
  const Rates r(s);
  const quad f_sr = max_of(CdfKernel{phi}, relays, r.bad);
  const quad f_sd = exp_cdf(r.sd, phi);
  const quad f_comb = f_sd * exp_cdf(r.rd, phi) / 2;
  OutageBreakdown out;
  out.f_sr = finish_prob(f_sr, "outage_bad_state");
  out.f_comb = finish_prob(f_comb, "outage_bad_state");
  out.f_sd = finish_prob(f_sd, "outage_bad_state");
  out.p_out = finish_prob(f_sr * f_sd + (1 - f_sr) * f_comb, "outage_bad_state");
  return out;
}

double outage_overall(int relays, const AvgSnrSet& s, double p_b, double phi) {
  check_relays(relays);
  return weighted(
      relays, p_b, [&](int n) { return outage_nth_good(relays, n, s, phi).p_out; },
      [&] { return outage_bad_state(relays, s, phi).p_out; }, "outage_overall");
}

// Asymptotic forms, evaluated in double: they are plain products.

namespace {

double prefactor(int relays, int rank, const AvgSnrSet& s) {
  const double c = relays * static_cast<double>(binomial(relays - 1, rank - 1));
  return c * std::pow(1.0 / s.g_a, relays - rank);
}

}  // namespace

double asym_pdf_sr_n(double x, int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  check_x(x);
  return prefactor(relays, rank, s) / s.g_sr * std::pow(x, relays - rank);
}

double asym_ber_relay(int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  const int n = relays - rank;
  return prefactor(relays, rank, s) / s.g_sr * std::tgamma(n + 1.5) /
         (2.0 * std::sqrt(std::numbers::pi) * (n + 1));
}

double asym_ber_dest_no_error(int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  const int n = relays - rank;
  return prefactor(relays, rank, s) / (2.0 * std::sqrt(std::numbers::pi) * (n + 1)) / s.g_rd /
         s.g_sd * std::tgamma(n + 2.5) / (n + 2);
}

double asym_mean_gamma_rd_n(int relays, int rank, const AvgSnrSet& s) {
  check_rank(relays, rank);
  check_snrs(s);
  const double c = relays * static_cast<double>(binomial(relays - 1, rank - 1));
  return c / s.g_rd * s.g_a * s.g_a * std::tgamma(relays - rank + 2.0);
}

BerBreakdown asym_ber_nth_good(int relays, int rank, const AvgSnrSet& s) {
  BerBreakdown out;
  out.relay = asym_ber_relay(relays, rank, s);
  out.dest_no_error = asym_ber_dest_no_error(relays, rank, s);
  const double mean_rd = asym_mean_gamma_rd_n(relays, rank, s);
  out.dest_error = mean_rd / (mean_rd + s.g_sd);
  out.dest = out.relay * out.dest_error + (1.0 - out.relay) * out.dest_no_error;
  return out;
}

double asym_ber_relay_bad(int relays, const AvgSnrSet& s) {
  check_relays(relays);
  check_snrs(s);
  return std::pow(1.0 / s.g_sr_bad, relays) * std::tgamma(relays + 0.5) /
         (2.0 * std::sqrt(std::numbers::pi));
}

BerBreakdown asym_ber_bad(int relays, const AvgSnrSet& s) {
  BerBreakdown out;
  out.relay = asym_ber_relay_bad(relays, s);
  out.dest_no_error = ber_mrc_two_branch(s.g_sd, s.g_rd);
  out.dest_error = s.g_rd / (s.g_rd + s.g_sd);
  out.dest = out.relay * out.dest_error + (1.0 - out.relay) * out.dest_no_error;
  return out;
}

double asym_outage(int relays, int rank, const AvgSnrSet& s, double phi) {
  check_rank(relays, rank);
  check_snrs(s);
  check_phi(phi);
  const int n = relays - rank;
  return prefactor(relays, rank, s) / (n + 1) / s.g_sd * std::pow(phi, n + 2) *
         (1.0 / ((n + 2) * s.g_rd) + 1.0 / s.g_sr);
}

double asym_outage_bad(int relays, const AvgSnrSet& s, double phi) {
  check_relays(relays);
  check_snrs(s);
  check_phi(phi);
  const double f_sr = std::pow(phi / s.g_sr_bad, relays);
  const double f_sd = phi / s.g_sd;
  const double f_comb = phi * phi / (2.0 * s.g_sd * s.g_rd);
  return f_sr * f_sd + (1.0 - f_sr) * f_comb;
}

double asym_ber_overall(int relays, const AvgSnrSet& s, double p_b) {
  check_relays(relays);
  return weighted(
      relays, p_b, [&](int n) { return asym_ber_nth_good(relays, n, s).dest; },
      [&] { return asym_ber_bad(relays, s).dest; }, "asym_ber_overall", false);
}

double asym_ber_relay_overall(int relays, const AvgSnrSet& s, double p_b) {
  check_relays(relays);
  return weighted(
      relays, p_b, [&](int n) { return asym_ber_relay(relays, n, s); },
      [&] { return asym_ber_relay_bad(relays, s); }, "asym_ber_relay_overall", false);
}

double asym_outage_overall(int relays, const AvgSnrSet& s, double p_b, double phi) {
  check_relays(relays);
  return weighted(
      relays, p_b, [&](int n) { return asym_outage(relays, n, s, phi); },
      [&] { return asym_outage_bad(relays, s, phi); }, "asym_outage_overall", false);
}

}  // namespace imprelay::analytic
