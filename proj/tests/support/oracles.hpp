#pragma once

// Independent reference computations used by the tests: adaptive quadrature,
// goodness-of-fit statistics and brute-force sampling of the selection process.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "imprelay/noise_channel.hpp"

namespace oracle {

namespace detail {

// Bisects until the Kronrod/Gauss difference meets this panel's share of the
// absolute budget.
inline double adapt(const std::function<double(double)>& f, double a, double b, double budget,
                    int depth) {
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= budget || depth == 0) return v;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * budget, depth - 1) + adapt(f, m, b, 0.5 * budget, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod over consecutive breakpoints with an absolute
/// error budget `tol` for the whole integral.
inline double integrate(const std::function<double(double)>& f, std::vector<double> breaks,
                        double tol = 1e-10) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const double panels = static_cast<double>(breaks.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += detail::adapt(f, breaks[i], breaks[i + 1], tol / panels, 30);
  }
  return total;
}

/// Breakpoints on [0, 50 * max scale], refined around every scale present and
/// around the unit scale of the erfc kernel.
inline std::vector<double> breaks_for(std::initializer_list<double> scales, double upper_mult = 50) {
  std::vector<double> b{0.0, 1e-6, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  double top = 0.0;
  for (double s : scales) {
    for (double m : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) b.push_back(m * s);
    top = std::max(top, s);
  }
  b.push_back(upper_mult * top);
  std::sort(b.begin(), b.end());
  b.erase(std::remove_if(b.begin(), b.end(), [&](double v) { return v > upper_mult * top; }),
          b.end());
  return b;
}

/// 1/2 int erfc(sqrt(x)) f(x) dx, integrated in u = sqrt(x) so the kernel is
/// smooth at the origin.
inline double ber_of_density(const std::function<double(double)>& pdf,
                             const std::vector<double>& breaks) {
  std::vector<double> u;
  for (double b : breaks) u.push_back(std::sqrt(b));
  return integrate([&](double t) { return std::erfc(t) * pdf(t * t) * t; }, u);
}

/// Classical single-branch Rayleigh BPSK BER.
inline double rayleigh_bpsk(double g) { return 0.5 * (1.0 - std::sqrt(g / (1.0 + g))); }

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/// Pearson chi-square of `samples` against `cdf`, with `bins` equiprobable
/// bins found by bisection on the cdf.
inline ChiSquareResult chi_square_gof(const std::vector<double>& samples,
                                      const std::function<double(double)>& cdf, int bins,
                                      double hi) {
  std::vector<double> edges{0.0};
  for (int i = 1; i < bins; ++i) {
    const double target = static_cast<double>(i) / bins;
    double lo = edges.back(), up = hi;
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (lo + up);
      (cdf(mid) < target ? lo : up) = mid;
    }
    edges.push_back(0.5 * (lo + up));
  }
  std::vector<double> counts(bins, 0.0);
  for (double x : samples) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    counts[static_cast<std::size_t>(it - edges.begin() - 1)] += 1.0;
  }
  const double expected = static_cast<double>(samples.size()) / bins;
  ChiSquareResult r;
  for (double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  r.dof = bins - 1;
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

/// Kolmogorov-Smirnov D statistic.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// 1% critical value of the one-sample KS statistic for large n.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

struct OrderDraw {
  double g_sr;
  double g_rd;
};

/// Draws M independent (gamma_SR, gamma_RD) pairs, ranks them by the smaller
/// hop and returns the pair ranked N (1 = best). Ties are impossible a.s.
inline std::vector<OrderDraw> sample_nth_best(int m, int n, double g_sr, double g_rd,
                                              std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  boost::random::exponential_distribution<double> e_sr(1.0 / g_sr), e_rd(1.0 / g_rd);
  std::vector<OrderDraw> out;
  out.reserve(draws);
  std::vector<OrderDraw> pairs(static_cast<std::size_t>(m));
  for (std::size_t d = 0; d < draws; ++d) {
    for (auto& p : pairs) {
      p.g_sr = e_sr(rng);
      p.g_rd = e_rd(rng);
    }
    std::nth_element(pairs.begin(), pairs.begin() + (n - 1), pairs.end(),
                     [](const OrderDraw& a, const OrderDraw& b) {
                       return std::min(a.g_sr, a.g_rd) > std::min(b.g_sr, b.g_rd);
                     });
    out.push_back(pairs[static_cast<std::size_t>(n - 1)]);
  }
  return out;
}

}  // namespace oracle
