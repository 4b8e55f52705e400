// Command-line front end. Talks to the simulator only through the C API.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "imprelay/imprelay.h"

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2, kCompareFailed = 3 };

int exit_for(imprelay_status st) {
  switch (st) {
    case IMPRELAY_OK: return kOk;
    case IMPRELAY_INVALID_ARGUMENT:
    case IMPRELAY_CONFIG_ERROR:
    case IMPRELAY_DOMAIN_ERROR: return kValidation;
    default: return kRuntime;
  }
}

int report(imprelay_status st, const char* context) {
  std::fprintf(stderr, "error: %s: %s\n", context, imprelay_last_error());
  return exit_for(st);
}

void on_point(double snr_db, void* user) {
  if (*static_cast<bool*>(user)) std::fprintf(stderr, "  %g dB done\n", snr_db);
}

struct Options {
  std::string config_path;
  std::string out;
  unsigned workers = 0;
  bool quiet = false;
};

// Flag -> configuration key.
const std::vector<std::pair<std::string, std::string>> kFlagKeys = {
    {"snr-start", "snr_start"},   {"snr-stop", "snr_stop"},       {"snr-step", "snr_step"},
    {"frames", "frames"},         {"symbols", "symbols"},         {"protocol", "protocol"},
    {"relays", "relays"},         {"rate", "rate"},               {"p-b", "p_b"},
    {"mu", "mu"},                 {"rho", "rho"},                 {"lambda-sr", "lambda_sr"},
    {"lambda-sd", "lambda_sd"},   {"lambda-rd", "lambda_rd"},     {"eta", "eta"},
    {"seed", "seed"},             {"channel-mode", "channel_mode"}, {"fallback", "fallback"},
};

void add_common(CLI::App* cmd, Options& opts, std::map<std::string, std::string>& raw) {
  cmd->add_option("--config", opts.config_path, "JSON configuration file");
  cmd->add_option("--out", opts.out, "output CSV path (stdout when omitted)");
  cmd->add_option("--workers", opts.workers, "worker threads (0 = all cores)");
  cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
  for (const auto& [flag, key] : kFlagKeys) {
    cmd->add_option("--" + flag, raw[flag], "override '" + key + "'");
  }
}

int emit(imprelay_result* res, const std::string& out) {
  if (!out.empty()) {
    const auto st = imprelay_result_write(res, out.c_str());
    if (st != IMPRELAY_OK) return report(st, "writing output");
    return kOk;
  }
  size_t needed = 0;
  auto st = imprelay_result_to_csv(res, nullptr, 0, &needed);
  if (st != IMPRELAY_OK) return report(st, "formatting output");
  std::string buf(needed, '\0');
  st = imprelay_result_to_csv(res, buf.data(), buf.size(), &needed);
  if (st != IMPRELAY_OK) return report(st, "formatting output");
  std::fputs(buf.c_str(), stdout);
  return kOk;
}

int run(const std::string& command, const Options& opts,
        const std::map<std::string, std::string>& raw, const std::vector<std::string>& given) {
  imprelay_config* cfg = nullptr;
  auto st = imprelay_config_create(&cfg);
  if (st != IMPRELAY_OK) return report(st, "creating config");
  struct Guard {
    imprelay_config* c;
    ~Guard() { imprelay_config_destroy(c); }
  } guard{cfg};

  if (!opts.config_path.empty()) {
    st = imprelay_config_load_file(cfg, opts.config_path.c_str());
    if (st != IMPRELAY_OK) return report(st, opts.config_path.c_str());
  }
  for (const auto& [flag, key] : kFlagKeys) {
    if (std::find(given.begin(), given.end(), flag) == given.end()) continue;
    st = imprelay_config_set(cfg, key.c_str(), raw.at(flag).c_str());
    if (st != IMPRELAY_OK) return report(st, ("--" + flag).c_str());
  }
  st = imprelay_config_validate(cfg);
  if (st != IMPRELAY_OK) return report(st, "configuration");

  bool progress = !opts.quiet;
  imprelay_result* res = nullptr;
  if (command == "sweep") {
    st = imprelay_run_sweep(cfg, opts.workers, on_point, &progress, &res);
  } else if (command == "analytic") {
    st = imprelay_run_analytic(cfg, &res);
  } else {
    st = imprelay_run_compare(cfg, opts.workers, on_point, &progress, &res);
  }
  if (st != IMPRELAY_OK) return report(st, command.c_str());

  int code = emit(res, opts.out);
  if (code == kOk && command == "compare" && !imprelay_result_passed(res)) {
    std::fprintf(stderr, "compare: at least one gated point exceeds the z-score limit\n");
    code = kCompareFailed;
  }
  imprelay_result_destroy(res);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative relay selection under bursty impulsive noise"};
  app.set_version_flag("--version", std::string(imprelay_version()));
  app.require_subcommand(1);

  Options opts;
  std::map<std::string, std::string> raw;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over the SNR grid");
  auto* analytic = app.add_subcommand("analytic", "closed-form and asymptotic curves only");
  auto* compare = app.add_subcommand("compare", "sweep and score against the analytic curves");
  for (auto* cmd : {sweep, analytic, compare}) add_common(cmd, opts, raw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  CLI::App* chosen = app.get_subcommands().front();
  std::vector<std::string> given;
  for (const auto& [flag, key] : kFlagKeys) {
    if (chosen->count("--" + flag) > 0) given.push_back(flag);
  }
  return run(chosen->get_name(), opts, raw, given);
}
