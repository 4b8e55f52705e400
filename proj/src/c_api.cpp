#include "imprelay/imprelay.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "imprelay/config.hpp"
#include "imprelay/records.hpp"

struct imprelay_config {
  imprelay::ConfigBuilder builder;
};

struct imprelay_result {
  imprelay_result_kind kind = IMPRELAY_RESULT_SWEEP;
  imprelay::SimulationConfig config;
  std::vector<imprelay::SweepRecord> records;
  std::vector<imprelay::CurveRow> curves;
  std::vector<imprelay::CompareRow> comparisons;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_symbol;

imprelay_status fail(imprelay_status status, std::string message, std::string symbol = {}) {
  last_error = std::move(message);
  last_symbol = std::move(symbol);
  return status;
}

template <class F>
imprelay_status guarded(F&& body) {
  last_error.clear();
  last_symbol.clear();
  try {
    body();
    return IMPRELAY_OK;
  } catch (const imprelay::ConfigError& e) {
    return fail(IMPRELAY_CONFIG_ERROR, e.what(), e.symbol());
  } catch (const imprelay::DomainError& e) {
    return fail(IMPRELAY_DOMAIN_ERROR, e.what());
  } catch (const imprelay::NumericalError& e) {
    return fail(IMPRELAY_NUMERICAL_ERROR, e.what());
  } catch (const imprelay::IoError& e) {
    return fail(IMPRELAY_IO_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IMPRELAY_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(IMPRELAY_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(IMPRELAY_INTERNAL_ERROR, "unknown error");
  }
}

imprelay_status null_arg(const char* name) {
  return fail(IMPRELAY_INVALID_ARGUMENT, std::string(name) + " must not be null");
}

imprelay_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf == nullptr) return IMPRELAY_OK;
  if (cap < text.size() + 1) return fail(IMPRELAY_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return IMPRELAY_OK;
}

imprelay::PointCallback wrap(imprelay_progress_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const imprelay::SweepRecord& r) { fn(r.snr_db, user); };
}

std::string render(const imprelay_result& r, const std::string& manifest) {
  switch (r.kind) {
    case IMPRELAY_RESULT_SWEEP: return imprelay::sweep_csv(r.records, r.config, manifest);
    case IMPRELAY_RESULT_ANALYTIC: return imprelay::curves_csv(r.curves, r.config, manifest);
    case IMPRELAY_RESULT_COMPARE: return imprelay::compare_csv(r.comparisons, r.config, manifest);
  }
  return {};
}

const char* command_name(imprelay_result_kind kind) {
  switch (kind) {
    case IMPRELAY_RESULT_SWEEP: return "sweep";
    case IMPRELAY_RESULT_ANALYTIC: return "analytic";
    case IMPRELAY_RESULT_COMPARE: return "compare";
  }
  return "unknown";
}

template <std::size_t N>
void copy_name(char (&dst)[N], std::string_view src) {
  const std::size_t n = std::min(N - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

}  // namespace

extern "C" {

const char* imprelay_version(void) { return imprelay::kVersion; }

const char* imprelay_last_error(void) { return last_error.c_str(); }

const char* imprelay_last_error_symbol(void) { return last_symbol.c_str(); }

imprelay_status imprelay_config_create(imprelay_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new imprelay_config(); });
}

void imprelay_config_destroy(imprelay_config* cfg) { delete cfg; }

imprelay_status imprelay_config_load_file(imprelay_config* cfg, const char* path) {
  if (!cfg) return null_arg("cfg");
  if (!path) return null_arg("path");
  return guarded([&] { cfg->builder.merge_file(path); });
}

imprelay_status imprelay_config_load_json(imprelay_config* cfg, const char* text) {
  if (!cfg) return null_arg("cfg");
  if (!text) return null_arg("text");
  return guarded([&] { cfg->builder.merge_json_text(text); });
}

imprelay_status imprelay_config_set(imprelay_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return guarded([&] { cfg->builder.set(key, value); });
}

imprelay_status imprelay_config_validate(const imprelay_config* cfg) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] { (void)cfg->builder.build(); });
}

imprelay_status imprelay_config_to_json(const imprelay_config* cfg, char* buf, size_t cap,
                                        size_t* needed) {
  if (!cfg) return null_arg("cfg");
  std::string text;
  const auto st = guarded([&] { text = imprelay::config_to_json(cfg->builder.build()); });
  if (st != IMPRELAY_OK) return st;
  return copy_out(text, buf, cap, needed);
}

imprelay_status imprelay_run_sweep(const imprelay_config* cfg, unsigned workers,
                                   imprelay_progress_fn progress, void* user,
                                   imprelay_result** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto res = std::make_unique<imprelay_result>();
    res->kind = IMPRELAY_RESULT_SWEEP;
    res->config = cfg->builder.build();
    res->records = imprelay::run_sweep(res->config, workers, wrap(progress, user));
    *out = res.release();
  });
}

imprelay_status imprelay_run_analytic(const imprelay_config* cfg, imprelay_result** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto res = std::make_unique<imprelay_result>();
    res->kind = IMPRELAY_RESULT_ANALYTIC;
    res->config = cfg->builder.build();
    res->curves = imprelay::analytic_curves(res->config);
    *out = res.release();
  });
}

imprelay_status imprelay_run_compare(const imprelay_config* cfg, unsigned workers,
                                     imprelay_progress_fn progress, void* user,
                                     imprelay_result** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto res = std::make_unique<imprelay_result>();
    res->kind = IMPRELAY_RESULT_COMPARE;
    res->config = cfg->builder.build();
    res->records = imprelay::run_sweep(res->config, workers, wrap(progress, user));
    res->comparisons = imprelay::compare_records(res->records);
    *out = res.release();
  });
}

void imprelay_result_destroy(imprelay_result* res) { delete res; }

imprelay_result_kind imprelay_result_get_kind(const imprelay_result* res) {
  return res ? res->kind : IMPRELAY_RESULT_SWEEP;
}

size_t imprelay_result_count(const imprelay_result* res) {
  if (!res) return 0;
  return res->kind == IMPRELAY_RESULT_ANALYTIC ? res->curves.size() : res->records.size();
}

imprelay_status imprelay_result_get(const imprelay_result* res, size_t index,
                                    imprelay_record* out) {
  if (!res) return null_arg("res");
  if (!out) return null_arg("out");
  if (res->kind == IMPRELAY_RESULT_ANALYTIC) {
    return fail(IMPRELAY_INVALID_ARGUMENT, "analytic results hold curves; use result_get_curve");
  }
  if (index >= res->records.size()) return fail(IMPRELAY_INVALID_ARGUMENT, "index out of range");
  const auto& r = res->records[index];
  *out = imprelay_record{};
  out->snr_db = r.snr_db;
  out->ber_relay = r.ber_relay.p;
  out->ber_relay_ci = r.ber_relay.ci;
  out->ber_dest = r.ber_dest.p;
  out->ber_dest_ci = r.ber_dest.ci;
  out->p_out = r.p_out.p;
  out->p_out_ci = r.p_out.ci;
  out->analytic_ber = r.analytic_ber;
  out->analytic_pout = r.analytic_pout;
  out->asym_ber = r.asym_ber;
  out->asym_pout = r.asym_pout;
  out->bits = r.bits;
  out->relay_errors = r.relay_errors;
  out->dest_errors = r.dest_errors;
  out->outages = r.outages;
  out->failed_frames = r.failed_frames;
  out->frames = r.frames;
  out->symbols_per_frame = r.symbols_per_frame;
  out->seed = r.seed;
  copy_name(out->protocol, imprelay::to_string(r.protocol));
  last_error.clear();
  return IMPRELAY_OK;
}

imprelay_status imprelay_result_get_curve(const imprelay_result* res, size_t index,
                                          imprelay_curve* out) {
  if (!res) return null_arg("res");
  if (!out) return null_arg("out");
  if (res->kind != IMPRELAY_RESULT_ANALYTIC) {
    return fail(IMPRELAY_INVALID_ARGUMENT, "only analytic results hold curves");
  }
  if (index >= res->curves.size()) return fail(IMPRELAY_INVALID_ARGUMENT, "index out of range");
  const auto& c = res->curves[index];
  *out = imprelay_curve{};
  out->snr_db = c.snr_db;
  out->ber_relay = c.ber_relay;
  out->ber_dest = c.ber_dest;
  out->p_out = c.p_out;
  out->asym_ber_relay = c.asym_ber_relay;
  out->asym_ber_dest = c.asym_ber_dest;
  out->asym_pout = c.asym_pout;
  copy_name(out->scheme, c.scheme);
  last_error.clear();
  return IMPRELAY_OK;
}

int imprelay_result_passed(const imprelay_result* res) {
  if (!res || res->kind != IMPRELAY_RESULT_COMPARE) return 0;
  return imprelay::all_pass(res->comparisons) ? 1 : 0;
}

imprelay_status imprelay_result_to_csv(const imprelay_result* res, char* buf, size_t cap,
                                       size_t* needed) {
  if (!res) return null_arg("res");
  std::string text;
  const auto st = guarded([&] { text = render(*res, "(in-memory)"); });
  if (st != IMPRELAY_OK) return st;
  return copy_out(text, buf, cap, needed);
}

imprelay_status imprelay_result_write(const imprelay_result* res, const char* path) {
  if (!res) return null_arg("res");
  if (!path) return null_arg("path");
  return guarded([&] {
    const std::filesystem::path p(path);
    imprelay::write_with_manifest(p, render(*res, imprelay::manifest_name_for(p)), res->config,
                                  command_name(res->kind));
  });
}

}  // extern "C"
