// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failing criteria (0 when all pass).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "imprelay/analytic.hpp"
#include "imprelay/records.hpp"
#include "imprelay/sim_engine.hpp"
#include "imprelay/state_detector.hpp"
#include "support/oracles.hpp"

using namespace imprelay;
namespace an = imprelay::analytic;

namespace {

// Pinned tolerances and budgets.
constexpr std::uint64_t kFrames = 20000;
constexpr std::size_t kSymbols = 1000;
// At 15 dB the two positions differ by about 7e-8 in destination BER, which
// needs a few 1e8 bits to resolve; 20 dB would need ~1e10 and stays at kFrames.
constexpr std::uint64_t kTrendFrames15 = 300000;
constexpr double kZMax = 3.0;
constexpr double kMinProbability = 1e-5;
constexpr double kMapFactor = 1.3;
constexpr std::size_t kOrderDraws = 1000000;
constexpr int kGofBins = 100;
constexpr double kGofLevel = 0.01;
constexpr double kQuadTol = 1e-8;
constexpr double kRatioLo = 0.9, kRatioHi = 1.1;
constexpr double kFiniteOutageCut = 1e-8;
constexpr double kSlopeTol = 0.05;
constexpr double kPhi = 3.0;

// Lines are collected and printed in criterion order at the end; progress
// goes to stderr as each one completes.
std::map<int, std::string> lines;

void report(int id, bool pass, const std::string& detail) {
  char head[32];
  std::snprintf(head, sizeof head, "criterion %2d: %s  ", id, pass ? "PASS" : "FAIL");
  lines[id] = head + detail;
  std::fprintf(stderr, "%s\n", lines[id].c_str());
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

SimulationConfig base(Protocol p, std::vector<double> grid) {
  SimulationConfig c;
  c.protocol = p;
  c.frames = kFrames;
  c.symbols = kSymbols;
  c.snr_db = std::move(grid);
  c.seed = 20240;
  return c;
}

// Sweeps keyed by a label, run once and shared between criteria.
std::map<std::string, std::vector<SweepRecord>> cache;

const std::vector<SweepRecord>& sweep(const std::string& key, const SimulationConfig& c) {
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::fprintf(stderr, "running %s ...\n", key.c_str());
  return cache.emplace(key, run_sweep(c)).first->second;
}

const SweepRecord& at(const std::vector<SweepRecord>& recs, double snr) {
  for (const auto& r : recs) {
    if (r.snr_db == snr) return r;
  }
  throw std::runtime_error("grid point missing");
}

// a <= b allowing the combined 95% half-width of both estimates.
bool leq_within_ci(const Estimate& a, const Estimate& b) {
  return a.p <= b.p + std::hypot(a.ci, b.ci);
}

AvgSnrSet snrs_at(double snr_db) {
  SimulationConfig c;
  return average_snrs(c.topology, c.noise_at(snr_db));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_genie_vs_analytic() {
  const auto& recs =
      sweep("genie", base(Protocol::nth_best_genie, {5, 10, 15, 20, 25}));
  CompareOptions opts;
  opts.z_max = kZMax;
  opts.min_probability = kMinProbability;
  const auto rows = compare_records(recs, opts);
  for (const char* quantity : {"ber_dest", "p_out"}) {
    bool pass = true;
    std::string detail;
    for (const auto& r : rows) {
      if (r.quantity != quantity) continue;
      pass = pass && r.pass;
      detail += fmt("%g dB z=%.2f", r.snr_db, r.z) + (r.gated ? "; " : " (ungated); ");
    }
    report(std::string(quantity) == "ber_dest" ? 1 : 2, pass, detail);
  }
}

void criterion_map_near_genie() {
  const auto& genie = sweep("genie", base(Protocol::nth_best_genie, {5, 10, 15, 20, 25}));
  const auto& map = sweep("map", base(Protocol::nth_best_map, {10, 15, 20, 25}));
  bool pass = true;
  std::string detail;
  for (double snr : {10.0, 15.0, 20.0}) {
    const auto& g = at(genie, snr);
    const auto& m = at(map, snr);
    const bool ok = m.ber_relay.p <= kMapFactor * g.ber_relay.p + m.ber_relay.ci;
    pass = pass && ok;
    detail += fmt("%g dB errors map %.0f genie %.0f; ", snr, static_cast<double>(m.relay_errors),
                  static_cast<double>(g.relay_errors));
  }
  report(3, pass, "relay BER " + detail);
}

void criterion_memoryless_limit() {
  SimulationConfig c;
  c.mu = 1.0;
  bool identical = true;
  std::uint64_t epochs = 0, bad_decisions = 0;
  for (std::uint64_t frame = 0; frame < 100; ++frame) {
    const double snr = 5.0 * static_cast<double>(frame % 5);
    const auto noise = c.noise_at(snr);
    Rng rng = make_substream(77, frame, 0);
    FrameTrace t;
    sample_frame_trace(c.topology, noise, kSymbols, c.mode, rng, t);
    StateDetector map(DetectorKind::map, noise, c.topology.p_s);
    StateDetector ml(DetectorKind::memoryless, noise, c.topology.p_s);
    StateSequence a(kSymbols), b(kSymbols);
    std::vector<Complex> y(kSymbols);
    for (std::size_t r = 0; r < t.relays(); ++r) {
      for (std::size_t k = 0; k < kSymbols; ++k) {
        const double x = (rng() >> 63) ? -1.0 : 1.0;
        y[k] = std::sqrt(c.topology.p_s) * t.h_sr[r][k] * x + t.n_sr[r][k];
      }
      map.detect(y, t.h_sr[r], a);
      ml.detect(y, t.h_sr[r], b);
      identical = identical && a == b;
      epochs += kSymbols;
      for (auto s : a) bad_decisions += s == NoiseState::bad;
    }
  }
  report(4, identical,
         fmt("%.0f epochs, %.0f B decisions", static_cast<double>(epochs),
             static_cast<double>(bad_decisions)));
}

void criterion_awgn_collapse() {
  std::vector<std::vector<SweepRecord>> sets;
  for (auto [name, p] : {std::pair{"map", Protocol::nth_best_map},
                         std::pair{"memoryless", Protocol::nth_best_memoryless},
                         std::pair{"conventional", Protocol::conventional}}) {
    auto c = base(p, {10, 15, 20});
    c.rho = 1.0;
    sets.push_back(sweep(std::string("rho1-") + name, c));
  }
  bool pass = true;
  std::string detail;
  for (double snr : {10.0, 15.0, 20.0}) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = i + 1; j < sets.size(); ++j) {
        const auto& a = at(sets[i], snr).ber_dest;
        const auto& b = at(sets[j], snr).ber_dest;
        const double gap = std::fabs(a.p - b.p) / std::hypot(a.ci, b.ci);
        worst = std::max(worst, gap);
        pass = pass && gap <= 1.0;
      }
    }
    detail += fmt("%g dB worst gap %.2f CI; ", snr, worst);
  }
  report(5, pass, detail);
}

void criterion_order_statistics() {
  const auto s = snrs_at(10.0);
  bool pass = true;
  std::string detail;
  for (auto [m, n] : {std::pair{5, 1}, std::pair{5, 3}}) {
    const auto draws = oracle::sample_nth_best(m, n, s.g_sr, s.g_rd, kOrderDraws, 500 + m * 10 + n);
    std::vector<double> sr, rd;
    sr.reserve(draws.size());
    rd.reserve(draws.size());
    for (const auto& d : draws) {
      sr.push_back(d.g_sr);
      rd.push_back(d.g_rd);
    }
    const auto gsr = oracle::chi_square_gof(
        sr, [&](double x) { return an::cdf_gamma_sr_n(x, m, n, s); }, kGofBins, 60 * s.g_sr);
    const auto grd = oracle::chi_square_gof(
        rd, [&](double x) { return an::cdf_gamma_rd_n(x, m, n, s); }, kGofBins, 60 * s.g_rd);
    const auto b = oracle::breaks_for({s.g_sr, s.g_rd, s.g_a});
    const double isr = oracle::integrate([&](double x) { return an::pdf_gamma_sr_n(x, m, n, s); }, b);
    const double ird = oracle::integrate([&](double x) { return an::pdf_gamma_rd_n(x, m, n, s); }, b);
    pass = pass && gsr.p_value > kGofLevel && grd.p_value > kGofLevel &&
           std::fabs(isr - 1) <= kQuadTol && std::fabs(ird - 1) <= kQuadTol;
    detail += fmt("(%g,%g) p=%.3f/%.3f ", m, n, gsr.p_value, grd.p_value) +
              fmt("int-1=%.1e/%.1e; ", isr - 1, ird - 1);
  }
  report(6, pass, detail);
}

void criterion_quadrature_consistency() {
  double worst = 0.0;
  const std::vector<double> ob{0.0, 1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, kPhi};
  for (double snr : {0.0, 10.0, 20.0, 30.0}) {
    const auto s = snrs_at(snr);
    for (int n = 1; n <= 5; ++n) {
      const auto sr = [&](double x) { return an::pdf_gamma_sr_n(x, 5, n, s); };
      const auto srnd = [&](double x) { return an::pdf_gamma_srnd(x, 5, n, s); };
      const auto ber = an::ber_nth_good(5, n, s);
      worst = std::max(worst, std::fabs(ber.relay - oracle::ber_of_density(
                                            sr, oracle::breaks_for({s.g_sr, s.g_rd, s.g_a}))));
      worst = std::max(worst, std::fabs(ber.dest_no_error -
                                        oracle::ber_of_density(
                                            srnd, oracle::breaks_for({s.g_sd, s.g_rd, s.g_a}))));
      const auto o = an::outage_nth_good(5, n, s, kPhi);
      worst = std::max(worst, std::fabs(o.f_sr - oracle::integrate(sr, ob)));
      worst = std::max(worst, std::fabs(o.f_comb - oracle::integrate(srnd, ob)));
    }
    const auto bad = [&](double x) { return an::pdf_gamma_sr_bad(x, 5, s); };
    worst = std::max(worst, std::fabs(an::ber_bad_state(5, s).relay -
                                      oracle::ber_of_density(bad, oracle::breaks_for({s.g_sr_bad}))));
    worst = std::max(worst, std::fabs(an::outage_bad_state(5, s, kPhi).f_sr - oracle::integrate(bad, ob)));
  }
  report(7, worst <= kQuadTol, fmt("max |closed form - quadrature| = %.2e", worst));
}

void criterion_asymptotic_agreement() {
  SimulationConfig c;
  for (double snr : c.snr_db) {
    const auto s = snrs_at(snr);
    const double finite = an::outage_nth_good(5, 1, s, kPhi).p_out;
    if (finite > kFiniteOutageCut) continue;
    const double ratio = finite / an::asym_outage(5, 1, s, kPhi);
    report(8, ratio >= kRatioLo && ratio <= kRatioHi,
           fmt("%g dB finite %.3e ratio %.4f", snr, finite, ratio));
    return;
  }
  report(8, false, "no grid point with finite outage below the cut");
}

void criterion_diversity() {
  bool pass = true;
  std::string detail;
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> g, v;
    for (double d = 35; d <= 40; d += 1) {
      g.push_back(d);
      v.push_back(an::asym_outage(5, n, snrs_at(d), kPhi));
    }
    const double slope = fit_diversity_slope(g, v, 35, 40);
    pass = pass && std::fabs(slope - (5 - n + 2)) <= kSlopeTol;
    detail += fmt("N=%g slope %.4f; ", n, slope);
  }
  report(9, pass, detail);
}

void criterion_relay_position() {
  bool pass = true;
  std::string detail;
  for (double snr : {15.0, 20.0}) {
    auto near = base(Protocol::nth_best_genie, {snr});
    near.frames = snr == 15.0 ? kTrendFrames15 : kFrames;
    near.topology = Topology::collinear(5, 1.0, 0.2, 2.0);
    auto far = near;
    far.topology = Topology::collinear(5, 1.0, 0.8, 2.0);
    const auto key = fmt("%g", snr);
    const auto& a = sweep("genie-lsr0.2-" + key, near)[0];
    const auto& b = sweep("genie-lsr0.8-" + key, far)[0];
    pass = pass && a.ber_dest.p + std::hypot(a.ber_dest.ci, b.ber_dest.ci) < b.ber_dest.p;
    detail += fmt("%g dB errors %.0f vs %.0f in %.1e bits; ", snr, static_cast<double>(a.dest_errors),
                  static_cast<double>(b.dest_errors), static_cast<double>(a.bits));
  }
  report(10, pass, detail);
}

void criterion_protocol_ordering() {
  const std::vector<double> grid{15, 20, 25};
  std::vector<const std::vector<SweepRecord>*> order{
      &sweep("genie", base(Protocol::nth_best_genie, {5, 10, 15, 20, 25})),
      &sweep("map", base(Protocol::nth_best_map, {10, 15, 20, 25})),
      &sweep("memoryless", base(Protocol::nth_best_memoryless, grid)),
      &sweep("conventional", base(Protocol::conventional, grid)),
      &sweep("random", base(Protocol::random, grid)),
  };
  bool pass = true;
  std::string detail;
  for (double snr : grid) {
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const auto& a = at(*order[i], snr);
      const auto& b = at(*order[i + 1], snr);
      const bool ok = leq_within_ci(a.ber_relay, b.ber_relay) && leq_within_ci(a.ber_dest, b.ber_dest);
      if (!ok) detail += fmt("%g dB break at pair %g; ", snr, static_cast<double>(i));
      pass = pass && ok;
    }
  }
  report(11, pass, pass ? "relay and destination BER ordered at 15, 20, 25 dB" : detail);
}

void criterion_reproducibility() {
  SimulationConfig c;
  c.frames = 200;
  c.symbols = kSymbols;
  c.snr_db = {0, 10, 20};
  const auto dir = std::filesystem::temp_directory_path() / "imprelay_acceptance";
  std::filesystem::create_directories(dir);
  const auto a = dir / "one.csv", b = dir / "eight.csv";
  const std::string manifest = "records.csv.manifest.json";
  write_with_manifest(a, sweep_csv(run_sweep(c, 1), c, manifest), c, "sweep");
  write_with_manifest(b, sweep_csv(run_sweep(c, 8), c, manifest), c, "sweep");
  const auto x = slurp(a), y = slurp(b);
  report(12, !x.empty() && x == y, fmt("%.0f bytes each", static_cast<double>(x.size())));
}

}  // namespace

int main() {
  try {
    criterion_memoryless_limit();
    criterion_order_statistics();
    criterion_quadrature_consistency();
    criterion_asymptotic_agreement();
    criterion_diversity();
    criterion_reproducibility();
    criterion_genie_vs_analytic();
    criterion_map_near_genie();
    criterion_awgn_collapse();
    criterion_relay_position();
    criterion_protocol_ordering();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 100;
  }
  int failures = 0;
  for (const auto& [id, line] : lines) {
    std::printf("%s\n", line.c_str());
    failures += line.find(": FAIL") != std::string::npos;
  }
  std::printf("%d of %zu criteria failed\n", failures, lines.size());
  return failures;
}
