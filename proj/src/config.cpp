#include "imprelay/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <sstream>

namespace imprelay {

using nlohmann::ordered_json;

namespace {

enum class Kind { number, integer, text, optional_number };

struct KeySpec {
  const char* key;
  const char* symbol;
  Kind kind;
};

constexpr KeySpec kKeys[] = {
    {"p_b", "p_B", Kind::number},
    {"mu", "mu", Kind::number},
    {"rho", "rho", Kind::number},
    {"relays", "M", Kind::integer},
    {"lambda_sd", "lambda_SD", Kind::number},
    {"lambda_sr", "lambda_SR", Kind::number},
    {"lambda_rd", "lambda_RD", Kind::optional_number},
    {"eta", "eta", Kind::number},
    {"rate", "R", Kind::number},
    {"frames", "frames", Kind::integer},
    {"symbols", "K", Kind::integer},
    {"snr_start", "snr_start", Kind::number},
    {"snr_stop", "snr_stop", Kind::number},
    {"snr_step", "snr_step", Kind::number},
    {"seed", "seed", Kind::integer},
    {"protocol", "protocol", Kind::text},
    {"channel_mode", "channel_mode", Kind::text},
    {"fallback", "fallback", Kind::text},
};

const KeySpec& spec_for(std::string_view key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return k;
  }
  throw ConfigError(std::string(key), "unknown configuration key '" + std::string(key) + "'");
}

ordered_json defaults() {
  ordered_json j;
  j["p_b"] = 0.01;
  j["mu"] = 100.0;
  j["rho"] = 100.0;
  j["relays"] = 5;
  j["lambda_sd"] = 1.0;
  j["lambda_sr"] = 0.4;
  j["lambda_rd"] = nullptr;
  j["eta"] = 2.0;
  j["rate"] = 1.0;
  j["frames"] = 20000;
  j["symbols"] = 1000;
  j["snr_start"] = 0.0;
  j["snr_stop"] = 40.0;
  j["snr_step"] = 5.0;
  j["seed"] = 1;
  j["protocol"] = "nth_best_map";
  j["channel_mode"] = "per_symbol";
  j["fallback"] = "partial";
  return j;
}

void check_type(const KeySpec& k, const ordered_json& v) {
  const auto fail = [&](const char* expected) {
    throw ConfigError(k.symbol, std::string(k.symbol) + ": expected " + expected + ", got " +
                                    v.dump());
  };
  switch (k.kind) {
    case Kind::number:
      if (!v.is_number()) fail("a number");
      break;
    case Kind::optional_number:
      if (!v.is_number() && !v.is_null()) fail("a number or null");
      break;
    case Kind::integer:
      if (!v.is_number_integer()) fail("an integer");
      if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
        fail("a non-negative integer");
      }
      break;
    case Kind::text:
      if (!v.is_string()) fail("a string");
      break;
  }
}

ordered_json parse_value(const KeySpec& k, std::string_view text) {
  const auto bad = [&] {
    return ConfigError(k.symbol, std::string(k.symbol) + ": cannot parse '" + std::string(text) +
                                     "'");
  };
  const char* first = text.data();
  const char* last = text.data() + text.size();
  switch (k.kind) {
    case Kind::text:
      return std::string(text);
    case Kind::integer: {
      std::uint64_t v = 0;
      const auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) throw bad();
      return v;
    }
    case Kind::optional_number:
      if (text == "null") return nullptr;
      [[fallthrough]];
    case Kind::number: {
      double v = 0;
      const auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) throw bad();
      return v;
    }
  }
  throw bad();
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ConfigError("snr_step", "snr_step: must be positive");
  }
  if (!(stop >= start)) throw ConfigError("snr_stop", "snr_stop: must be >= snr_start");
  std::vector<double> grid;
  const double tol = 1e-9 * std::max(1.0, std::fabs(stop));
  for (std::size_t i = 0;; ++i) {
    const double v = std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9;
    if (v > stop + tol) break;
    grid.push_back(v);
    if (grid.size() > 100000) throw ConfigError("snr_step", "snr_step: grid too large");
  }
  return grid;
}

SimulationConfig from_document(const ordered_json& j) {
  SimulationConfig c;
  c.p_b = j["p_b"].get<double>();
  c.mu = j["mu"].get<double>();
  c.rho = j["rho"].get<double>();
  const auto relays = j["relays"].get<std::uint64_t>();
  if (relays > 1000) throw ConfigError("M", "M: relay count out of range");
  c.topology.relays = static_cast<int>(relays);
  c.topology.lambda_sd = j["lambda_sd"].get<double>();
  c.topology.lambda_sr = j["lambda_sr"].get<double>();
  c.topology.lambda_rd = j["lambda_rd"].is_null() ? c.topology.lambda_sd - c.topology.lambda_sr
                                                  : j["lambda_rd"].get<double>();
  c.topology.eta = j["eta"].get<double>();
  c.rate = j["rate"].get<double>();
  c.frames = j["frames"].get<std::uint64_t>();
  c.symbols = j["symbols"].get<std::uint64_t>();
  c.seed = j["seed"].get<std::uint64_t>();
  c.snr_db = make_grid(j["snr_start"].get<double>(), j["snr_stop"].get<double>(),
                       j["snr_step"].get<double>());

  const auto protocol = j["protocol"].get<std::string>();
  const auto p = parse_protocol(protocol);
  if (!p) throw ConfigError("protocol", "protocol: unknown value '" + protocol + "'");
  c.protocol = *p;

  const auto mode = j["channel_mode"].get<std::string>();
  if (mode == "per_symbol") {
    c.mode = ChannelMode::per_symbol;
  } else if (mode == "quasi_static") {
    c.mode = ChannelMode::quasi_static;
  } else {
    throw ConfigError("channel_mode", "channel_mode: unknown value '" + mode + "'");
  }

  const auto fallback = j["fallback"].get<std::string>();
  const auto f = parse_fallback(fallback);
  if (!f) throw ConfigError("fallback", "fallback: unknown value '" + fallback + "'");
  c.fallback = *f;

  c.validate();
  return c;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : kKeys) k.emplace_back(s.key);
    return k;
  }();
  return keys;
}

struct ConfigBuilder::Impl {
  ordered_json file = ordered_json::object();
  ordered_json overrides = ordered_json::object();

  ordered_json effective() const {
    ordered_json j = defaults();
    for (const auto& [k, v] : file.items()) j[k] = v;
    for (const auto& [k, v] : overrides.items()) j[k] = v;
    return j;
  }
};

ConfigBuilder::ConfigBuilder() : impl_(std::make_shared<Impl>()) {}

void ConfigBuilder::merge_json_text(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config", "config: top level must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    const KeySpec& spec = spec_for(k);
    check_type(spec, v);
    impl_->file[k] = v;
  }
}

void ConfigBuilder::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  merge_json_text(ss.str());
}

void ConfigBuilder::set(std::string_view key, std::string_view value) {
  const KeySpec& spec = spec_for(key);
  impl_->overrides[spec.key] = parse_value(spec, value);
}

SimulationConfig ConfigBuilder::build() const { return from_document(impl_->effective()); }

std::string ConfigBuilder::effective_json() const { return impl_->effective().dump(2); }

std::string config_to_json(const SimulationConfig& c) {
  ordered_json j;
  j["p_b"] = c.p_b;
  j["mu"] = c.mu;
  j["rho"] = c.rho;
  j["relays"] = c.topology.relays;
  j["lambda_sd"] = c.topology.lambda_sd;
  j["lambda_sr"] = c.topology.lambda_sr;
  j["lambda_rd"] = c.topology.lambda_rd;
  j["eta"] = c.topology.eta;
  j["rate"] = c.rate;
  j["frames"] = c.frames;
  j["symbols"] = c.symbols;
  j["snr_db"] = c.snr_db;
  j["seed"] = c.seed;
  j["protocol"] = std::string(to_string(c.protocol));
  j["channel_mode"] = c.mode == ChannelMode::per_symbol ? "per_symbol" : "quasi_static";
  j["fallback"] = std::string(to_string(c.fallback));
  return j.dump(2);
}

}  // namespace imprelay
