#include <doctest.h>

#include <cmath>

#include "imprelay/analytic.hpp"
#include "imprelay/sim_engine.hpp"

using namespace imprelay;

namespace {

SimulationConfig small_config(Protocol p, std::uint64_t frames, std::size_t symbols,
                              std::vector<double> grid) {
  SimulationConfig c;
  c.protocol = p;
  c.frames = frames;
  c.symbols = symbols;
  c.snr_db = std::move(grid);
  c.seed = 2024;
  return c;
}

bool same(const SweepRecord& a, const SweepRecord& b) {
  return a.snr_db == b.snr_db && a.bits == b.bits && a.relay_errors == b.relay_errors &&
         a.dest_errors == b.dest_errors && a.outages == b.outages &&
         a.failed_frames == b.failed_frames && a.ber_dest.p == b.ber_dest.p &&
         a.ber_dest.ci == b.ber_dest.ci && a.p_out.p == b.p_out.p &&
         a.analytic_ber == b.analytic_ber && a.asym_pout == b.asym_pout;
}

std::string symbol_of(const SimulationConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.symbol();
  }
  return "";
}

}  // namespace

TEST_SUITE("sim_engine") {

TEST_CASE("binomial estimates with confidence half-widths") {
  auto e = estimate_with_ci(0, 1000);
  CHECK(e.p == 0.0);
  CHECK(e.ci == doctest::Approx(0.003));
  e = estimate_with_ci(500, 1000);
  CHECK(e.p == 0.5);
  CHECK(e.ci == doctest::Approx(0.031).epsilon(0.01));
  e = estimate_with_ci(10, 1000000);
  CHECK(e.p == doctest::Approx(1e-5));
  CHECK(e.ci == doctest::Approx(6.2e-6).epsilon(0.01));
  e = estimate_with_ci(7, 7);
  CHECK(e.p == 1.0);
  CHECK_THROWS_AS(estimate_with_ci(0, 0), DomainError);
  CHECK_THROWS_AS(estimate_with_ci(3, 2), DomainError);
}

TEST_CASE("configuration validation names the offending symbol") {
  SimulationConfig c;
  CHECK(symbol_of(c).empty());
  c.frames = 0;
  CHECK(symbol_of(c) == "frames");
  c = {};
  c.symbols = 0;
  CHECK(symbol_of(c) == "K");
  c = {};
  c.p_b = 1.5;
  CHECK(symbol_of(c) == "p_B");
  c = {};
  c.mu = 0.5;
  CHECK(symbol_of(c) == "mu");
  c = {};
  c.rho = 0.5;
  CHECK(symbol_of(c) == "rho");
  c = {};
  c.snr_db = {};
  CHECK(symbol_of(c) == "snr");
  c.snr_db = {5, 5};
  CHECK(symbol_of(c) == "snr");
  c = {};
  c.topology.relays = 0;
  CHECK(symbol_of(c) == "M");
  c = {};
  c.rate = 0;
  CHECK(symbol_of(c) == "R");
  c = {};
  c.frames = 0;
  CHECK_THROWS_AS(run_sweep(c), ConfigError);
}

TEST_CASE("noise parameters per grid point") {
  SimulationConfig c;
  const auto n = c.noise_at(20.0);
  CHECK(n.sigma_g2 == doctest::Approx(0.01));
  CHECK(n.p_bad() == doctest::Approx(0.01));
  CHECK(n.memory() == doctest::Approx(100.0));
  CHECK(c.phi() == 3.0);
}

TEST_CASE("results do not depend on the worker count") {
  const auto c = small_config(Protocol::nth_best_map, 37, 200, {5, 15});
  const auto one = run_sweep(c, 1);
  const auto two = run_sweep(c, 2);
  const auto eight = run_sweep(c, 8);
  REQUIRE(one.size() == 2);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(same(one[i], two[i]));
    CHECK(same(one[i], eight[i]));
  }
  const auto rnd = small_config(Protocol::random, 20, 100, {10});
  CHECK(same(run_sweep(rnd, 1)[0], run_sweep(rnd, 3)[0]));
}

TEST_CASE("counts are conserved") {
  const auto c = small_config(Protocol::conventional, 25, 120, {0, 10});
  std::vector<double> seen;
  const auto recs = run_sweep(c, 2, [&](const SweepRecord& r) { seen.push_back(r.snr_db); });
  CHECK(seen == std::vector<double>{0, 10});
  for (const auto& r : recs) {
    CHECK(r.bits == 25u * 120u);
    CHECK(r.relay_errors <= r.bits);
    CHECK(r.dest_errors <= r.bits);
    CHECK(r.outages <= r.bits);
    CHECK(r.failed_frames == 0);
    CHECK(r.frames == 25);
    CHECK(r.symbols_per_frame == 120);
    CHECK(r.seed == 2024);
    for (const auto& e : {r.ber_relay, r.ber_dest, r.p_out}) CHECK((e.p >= 0 && e.p <= 1));
  }
}

TEST_CASE("confidence width follows the inverse square-root law") {
  // Four times the frames halves the half-width.
  const auto a = run_point(small_config(Protocol::nth_best_genie, 100, 1000, {0}), 0.0, 1);
  const auto b = run_point(small_config(Protocol::nth_best_genie, 400, 1000, {0}), 0.0, 1);
  REQUIRE(a.relay_errors > 200);
  const double ratio = a.ber_relay.ci / b.ber_relay.ci;
  CHECK(std::fabs(ratio - 2.0) <= 0.2);
}

TEST_CASE("genie Monte Carlo agrees with the closed form at 5 dB") {
  const auto r = run_point(small_config(Protocol::nth_best_genie, 2000, 1000, {5}), 5.0, 0);
  const double pa = r.analytic_ber;
  const double sigma = std::sqrt(pa * (1 - pa) / static_cast<double>(r.bits));
  CHECK(std::fabs(r.ber_dest.p - pa) <= 3 * sigma);
  const double po = r.analytic_pout;
  CHECK(po > 0.0);
  CHECK(r.asym_ber > 0.0);
}

TEST_CASE("analytic columns without simulation") {
  SimulationConfig c;
  const auto recs = analytic_sweep(c);
  REQUIRE(recs.size() == 9);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    CHECK(recs[i].analytic_ber < recs[i - 1].analytic_ber);
    CHECK(recs[i].analytic_pout < recs[i - 1].analytic_pout);
    CHECK(recs[i].bits == 0);
  }
  const auto s = average_snrs(c.topology, c.noise_at(10.0));
  CHECK(recs[2].analytic_ber == analytic::ber_overall(5, s, 0.01));
  CHECK(recs[2].analytic_ber_relay == analytic::ber_relay_overall(5, s, 0.01));
  CHECK(recs[2].analytic_pout == analytic::outage_overall(5, s, 0.01, 3.0));
}

TEST_CASE("diversity slope fitting") {
  std::vector<double> db{20, 25, 30, 35, 40}, v;
  for (double d : db) v.push_back(3.7 * std::pow(std::pow(10.0, d / 10), -6.0));
  CHECK(fit_diversity_slope(db, v, 20, 40) == doctest::Approx(6.0).epsilon(1e-9));

  SimulationConfig c;
  for (int n : {1, 2, 3}) {
    std::vector<double> g, out;
    for (double d = 35; d <= 40; d += 1) {
      g.push_back(d);
      out.push_back(analytic::asym_outage(5, n, average_snrs(c.topology, c.noise_at(d)), 3.0));
    }
    CHECK(std::fabs(fit_diversity_slope(g, out, 35, 40) - (5 - n + 2)) <= 0.05);
  }

  // Weighted over ranks, the all-bad term (diversity 2) dominates at high SNR.
  const auto recs = analytic_sweep(c);
  CHECK(fit_diversity_slope(recs, Metric::asym_pout, 35, 40) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(metric_value(recs[0], Metric::analytic_ber) == recs[0].analytic_ber);
  CHECK(metric_value(recs[0], Metric::asym_pout) == recs[0].asym_pout);
  CHECK_THROWS_AS(fit_diversity_slope(db, v, 50, 60), DomainError);
  std::vector<double> zeros(5, 0.0);
  CHECK_THROWS_AS(fit_diversity_slope(db, zeros, 20, 40), DomainError);
}

}  // TEST_SUITE
