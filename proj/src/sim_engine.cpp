#include "imprelay/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "imprelay/analytic.hpp"

namespace imprelay {

namespace {

void require(bool ok, const char* symbol, const std::string& what) {
  if (!ok) throw ConfigError(symbol, std::string(symbol) + ": " + what);
}

struct Counters {
  std::uint64_t bits = 0;
  std::uint64_t relay_errors = 0;
  std::uint64_t dest_errors = 0;
  std::uint64_t outages = 0;
  std::uint64_t failed = 0;

  Counters& operator+=(const Counters& o) {
    bits += o.bits;
    relay_errors += o.relay_errors;
    dest_errors += o.dest_errors;
    outages += o.outages;
    failed += o.failed;
    return *this;
  }
};

Counters simulate_block(const FrameSetup& setup, std::uint64_t seed, std::uint64_t first,
                        std::uint64_t last) {
  FrameSimulator sim(setup);
  std::vector<EpochOutcome> out;
  Counters c;
  for (std::uint64_t f = first; f < last; ++f) {
    try {
      sim.simulate(seed, f, out);
    } catch (const NumericalError&) {
      ++c.failed;
      continue;
    }
    for (const auto& e : out) {
      c.relay_errors += e.relay_bit_error;
      c.dest_errors += e.dest_bit_error;
      c.outages += e.outage_event;
    }
    c.bits += out.size();
  }
  return c;
}

}  // namespace

void SimulationConfig::validate() const {
  require(topology.relays >= 1 && topology.relays <= analytic::kMaxRelays, "M",
          "relay count must lie in [1, " + std::to_string(analytic::kMaxRelays) + "]");
  require(topology.lambda_sd > 0.0 && std::isfinite(topology.lambda_sd), "lambda_SD",
          "must be positive");
  require(topology.lambda_sr > 0.0 && std::isfinite(topology.lambda_sr), "lambda_SR",
          "must be positive");
  require(topology.lambda_rd > 0.0 && std::isfinite(topology.lambda_rd), "lambda_RD",
          "must be positive (collinear default lambda_SD - lambda_SR)");
  require(topology.eta > 0.0 && std::isfinite(topology.eta), "eta", "must be positive");
  require(p_b > 0.0 && p_b < 1.0, "p_B", "must lie in (0, 1), got " + std::to_string(p_b));
  require(mu > 0.0 && std::isfinite(mu), "mu", "must be positive, got " + std::to_string(mu));
  require(p_b / mu < 1.0 && (1.0 - p_b) / mu < 1.0, "mu",
          "too small for p_B: transition probabilities p_B/mu and (1-p_B)/mu must be < 1");
  require(rho >= 1.0 && std::isfinite(rho), "rho", "must be >= 1, got " + std::to_string(rho));
  require(rate > 0.0 && std::isfinite(rate), "R", "must be positive");
  require(frames >= 1, "frames", "must be >= 1");
  require(symbols >= 1, "K", "symbols per frame must be >= 1");
  require(!snr_db.empty(), "snr", "grid must be non-empty");
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    require(std::isfinite(snr_db[i]), "snr", "grid values must be finite");
    if (i > 0) require(snr_db[i] > snr_db[i - 1], "snr", "grid must be strictly increasing");
  }
}

double SimulationConfig::phi() const { return analytic::rate_threshold(rate); }

TsmgParams SimulationConfig::noise_at(double snr) const {
  return TsmgParams::from_stationary(p_b, mu, rho, std::pow(10.0, -snr / 10.0));
}

Estimate estimate_with_ci(std::uint64_t events, std::uint64_t trials) {
  if (trials == 0) throw DomainError("estimate_with_ci: trials must be >= 1");
  if (events > trials) throw DomainError("estimate_with_ci: events exceed trials");
  const double n = static_cast<double>(trials);
  if (events == 0) return {0.0, 3.0 / n};
  const double p = static_cast<double>(events) / n;
  return {p, 1.96 * std::sqrt(p * (1.0 - p) / n)};
}

void attach_analytic(const SimulationConfig& config, SweepRecord& rec) {
  const int m = config.topology.relays;
  const AvgSnrSet s = average_snrs(config.topology, config.noise_at(rec.snr_db));
  const double phi = config.phi();
  rec.analytic_ber = analytic::ber_overall(m, s, config.p_b);
  rec.analytic_ber_relay = analytic::ber_relay_overall(m, s, config.p_b);
  rec.analytic_pout = analytic::outage_overall(m, s, config.p_b, phi);
  rec.asym_ber = analytic::asym_ber_overall(m, s, config.p_b);
  rec.asym_pout = analytic::asym_outage_overall(m, s, config.p_b, phi);
}

std::vector<SweepRecord> analytic_sweep(const SimulationConfig& config) {
  config.validate();
  std::vector<SweepRecord> out;
  for (double snr : config.snr_db) {
    SweepRecord rec;
    rec.snr_db = snr;
    rec.protocol = config.protocol;
    rec.seed = config.seed;
    attach_analytic(config, rec);
    out.push_back(rec);
  }
  return out;
}

SweepRecord run_point(const SimulationConfig& config, double snr_db, unsigned workers) {
  config.validate();
  FrameSetup setup;
  setup.topology = config.topology;
  setup.noise = config.noise_at(snr_db);
  setup.protocol = config.protocol;
  setup.fallback = config.fallback;
  setup.symbols = config.symbols;
  setup.mode = config.mode;
  setup.phi = config.phi();
  setup.force_correct_relay = config.force_correct_relay;

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t n = config.frames;
  const auto w = static_cast<std::uint64_t>(std::min<std::uint64_t>(workers, n));

  std::vector<Counters> partial(w);
  std::vector<std::exception_ptr> errors(w);
  auto body = [&](std::uint64_t i) {
    try {
      partial[i] = simulate_block(setup, config.seed, n * i / w, n * (i + 1) / w);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (w == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::uint64_t i = 0; i < w; ++i) pool.emplace_back(body, i);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Counters total;
  for (const auto& c : partial) total += c;
  if (static_cast<double>(total.failed) > kMaxFrameFailureRate * static_cast<double>(n)) {
    throw NumericalError("state detection failed on " + std::to_string(total.failed) + " of " +
                         std::to_string(n) + " frames at " + std::to_string(snr_db) + " dB");
  }
  if (total.bits == 0) throw NumericalError("no frame completed");

  SweepRecord rec;
  rec.snr_db = snr_db;
  rec.protocol = config.protocol;
  rec.bits = total.bits;
  rec.relay_errors = total.relay_errors;
  rec.dest_errors = total.dest_errors;
  rec.outages = total.outages;
  rec.failed_frames = total.failed;
  rec.ber_relay = estimate_with_ci(total.relay_errors, total.bits);
  rec.ber_dest = estimate_with_ci(total.dest_errors, total.bits);
  rec.p_out = estimate_with_ci(total.outages, total.bits);
  rec.frames = n;
  rec.symbols_per_frame = config.symbols;
  rec.seed = config.seed;
  attach_analytic(config, rec);
  return rec;
}

std::vector<SweepRecord> run_sweep(const SimulationConfig& config, unsigned workers,
                                   const PointCallback& on_point) {
  config.validate();
  std::vector<SweepRecord> out;
  out.reserve(config.snr_db.size());
  for (double snr : config.snr_db) {
    out.push_back(run_point(config, snr, workers));
    if (on_point) on_point(out.back());
  }
  return out;
}

double fit_diversity_slope(std::span<const double> snr_db, std::span<const double> values,
                           double lo_db, double hi_db) {
  if (snr_db.size() != values.size()) throw DomainError("fit_diversity_slope: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    if (snr_db[i] < lo_db || snr_db[i] > hi_db || !(values[i] > 0.0)) continue;
    const double x = snr_db[i] / 10.0;
    const double y = std::log10(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw DomainError("fit_diversity_slope: need at least two positive points in window");
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (!(den > 0.0)) throw DomainError("fit_diversity_slope: degenerate window");
  return -(dn * sxy - sx * sy) / den;
}

double metric_value(const SweepRecord& rec, Metric m) {
  switch (m) {
    case Metric::ber_relay: return rec.ber_relay.p;
    case Metric::ber_dest: return rec.ber_dest.p;
    case Metric::p_out: return rec.p_out.p;
    case Metric::analytic_ber: return rec.analytic_ber;
    case Metric::analytic_pout: return rec.analytic_pout;
    case Metric::asym_ber: return rec.asym_ber;
    case Metric::asym_pout: return rec.asym_pout;
  }
  return 0.0;
}

double fit_diversity_slope(std::span<const SweepRecord> records, Metric metric, double lo_db,
                           double hi_db) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    x.push_back(r.snr_db);
    y.push_back(metric_value(r, metric));
  }
  return fit_diversity_slope(x, y, lo_db, hi_db);
}

}  // namespace imprelay
