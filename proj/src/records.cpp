#include "imprelay/records.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "imprelay/analytic.hpp"
#include "imprelay/config.hpp"

namespace imprelay {

namespace {

std::string header_comment(const SimulationConfig& config, const std::string& manifest_name) {
  return "# manifest=" + manifest_name + " config=" + config_digest(config) + "\n";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string config_digest(const SimulationConfig& config) {
  // FNV-1a over the canonical document.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string sweep_csv(const std::vector<SweepRecord>& records, const SimulationConfig& config,
                      const std::string& manifest_name) {
  std::ostringstream os;
  os << header_comment(config, manifest_name);
  os << "snr_db,protocol,ber_relay,ber_relay_ci,ber_dest,ber_dest_ci,p_out,p_out_ci,"
        "analytic_ber,analytic_pout,asym_ber,asym_pout,frames,symbols_per_frame,seed\n";
  for (const auto& r : records) {
    os << format_number(r.snr_db) << ',' << to_string(r.protocol) << ','
       << format_number(r.ber_relay.p) << ',' << format_number(r.ber_relay.ci) << ','
       << format_number(r.ber_dest.p) << ',' << format_number(r.ber_dest.ci) << ','
       << format_number(r.p_out.p) << ',' << format_number(r.p_out.ci) << ','
       << format_number(r.analytic_ber) << ',' << format_number(r.analytic_pout) << ','
       << format_number(r.asym_ber) << ',' << format_number(r.asym_pout) << ',' << r.frames
       << ',' << r.symbols_per_frame << ',' << r.seed << '\n';
  }
  return os.str();
}

std::vector<CurveRow> analytic_curves(const SimulationConfig& config) {
  config.validate();
  const int m = config.topology.relays;
  const double phi = config.phi();
  std::vector<CurveRow> rows;
  for (double snr : config.snr_db) {
    const AvgSnrSet s = average_snrs(config.topology, config.noise_at(snr));
    CurveRow overall{snr,
                     "overall",
                     analytic::ber_relay_overall(m, s, config.p_b),
                     analytic::ber_overall(m, s, config.p_b),
                     analytic::outage_overall(m, s, config.p_b, phi),
                     analytic::asym_ber_relay_overall(m, s, config.p_b),
                     analytic::asym_ber_overall(m, s, config.p_b),
                     analytic::asym_outage_overall(m, s, config.p_b, phi)};
    rows.push_back(overall);
    for (int n = 1; n <= m; ++n) {
      const auto b = analytic::ber_nth_good(m, n, s);
      const auto a = analytic::asym_ber_nth_good(m, n, s);
      rows.push_back({snr, "rank" + std::to_string(n), b.relay, b.dest,
                      analytic::outage_nth_good(m, n, s, phi).p_out, a.relay, a.dest,
                      analytic::asym_outage(m, n, s, phi)});
    }
    const auto b = analytic::ber_bad_state(m, s);
    const auto a = analytic::asym_ber_bad(m, s);
    rows.push_back({snr, "all_bad", b.relay, b.dest, analytic::outage_bad_state(m, s, phi).p_out,
                    a.relay, a.dest, analytic::asym_outage_bad(m, s, phi)});
  }
  return rows;
}

std::string curves_csv(const std::vector<CurveRow>& rows, const SimulationConfig& config,
                       const std::string& manifest_name) {
  std::ostringstream os;
  os << header_comment(config, manifest_name);
  os << "snr_db,scheme,ber_relay,ber_dest,p_out,asym_ber_relay,asym_ber_dest,asym_pout\n";
  for (const auto& r : rows) {
    os << format_number(r.snr_db) << ',' << r.scheme << ',' << format_number(r.ber_relay) << ','
       << format_number(r.ber_dest) << ',' << format_number(r.p_out) << ','
       << format_number(r.asym_ber_relay) << ',' << format_number(r.asym_ber_dest) << ','
       << format_number(r.asym_pout) << '\n';
  }
  return os.str();
}

std::vector<CompareRow> compare_records(const std::vector<SweepRecord>& records,
                                        const CompareOptions& opts) {
  std::vector<CompareRow> rows;
  for (const auto& r : records) {
    const auto add = [&](const char* quantity, double sim, double ana) {
      CompareRow row;
      row.snr_db = r.snr_db;
      row.protocol = r.protocol;
      row.quantity = quantity;
      row.simulated = sim;
      row.analytic = ana;
      row.sigma = std::sqrt(ana * (1.0 - ana) / static_cast<double>(r.bits));
      row.z = row.sigma > 0.0 ? std::fabs(sim - ana) / row.sigma : 0.0;
      row.gated = ana >= opts.min_probability;
      row.pass = !row.gated || row.z <= opts.z_max;
      rows.push_back(row);
    };
    add("ber_dest", r.ber_dest.p, r.analytic_ber);
    add("p_out", r.p_out.p, r.analytic_pout);
  }
  return rows;
}

bool all_pass(const std::vector<CompareRow>& rows) {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

std::string compare_csv(const std::vector<CompareRow>& rows, const SimulationConfig& config,
                        const std::string& manifest_name) {
  std::ostringstream os;
  os << header_comment(config, manifest_name);
  os << "snr_db,protocol,quantity,simulated,analytic,sigma,z,gated,pass\n";
  for (const auto& r : rows) {
    os << format_number(r.snr_db) << ',' << to_string(r.protocol) << ',' << r.quantity << ','
       << format_number(r.simulated) << ',' << format_number(r.analytic) << ','
       << format_number(r.sigma) << ',' << format_number(r.z) << ',' << (r.gated ? 1 : 0) << ','
       << (r.pass ? "PASS" : "FAIL") << '\n';
  }
  return os.str();
}

std::string manifest_name_for(const std::filesystem::path& path) {
  return path.filename().string() + ".manifest.json";
}

std::filesystem::path write_with_manifest(const std::filesystem::path& path,
                                          const std::string& content,
                                          const SimulationConfig& config,
                                          const std::string& command) {
  write_file(path, content);
  auto sidecar = path;
  sidecar += ".manifest.json";
  nlohmann::ordered_json m;
  m["tool"] = "imprelay";
  m["version"] = kVersion;
  m["command"] = command;
  m["config_digest"] = config_digest(config);
  m["config"] = nlohmann::ordered_json::parse(config_to_json(config));
  m["seed"] = config.seed;
  m["created_utc"] = utc_timestamp();
  m["outputs"] = {path.string()};
  write_file(sidecar, m.dump(2) + "\n");
  return sidecar;
}

}  // namespace imprelay
