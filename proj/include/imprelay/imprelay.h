/* C interface to the imprelay simulator and analytic engine.
 *
 * Every function returns an imprelay_status. On failure a description is
 * available from imprelay_last_error() on the calling thread until the next
 * call into the library from that thread. */
#ifndef IMPRELAY_IMPRELAY_H
#define IMPRELAY_IMPRELAY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(IMPRELAY_BUILDING_LIBRARY)
#    define IMPRELAY_API __declspec(dllexport)
#  else
#    define IMPRELAY_API __declspec(dllimport)
#  endif
#else
#  define IMPRELAY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum imprelay_status {
  IMPRELAY_OK = 0,
  IMPRELAY_INVALID_ARGUMENT = 1, /* null handle, bad index, short buffer */
  IMPRELAY_CONFIG_ERROR = 2,     /* rejected key or value; see last_error_symbol */
  IMPRELAY_DOMAIN_ERROR = 3,
  IMPRELAY_NUMERICAL_ERROR = 4,
  IMPRELAY_IO_ERROR = 5,
  IMPRELAY_INTERNAL_ERROR = 6
} imprelay_status;

typedef enum imprelay_result_kind {
  IMPRELAY_RESULT_SWEEP = 0,
  IMPRELAY_RESULT_ANALYTIC = 1,
  IMPRELAY_RESULT_COMPARE = 2
} imprelay_result_kind;

typedef struct imprelay_config imprelay_config;
typedef struct imprelay_result imprelay_result;

/* One simulated grid point. Probabilities with their 95% half-widths. */
typedef struct imprelay_record {
  double snr_db;
  double ber_relay, ber_relay_ci;
  double ber_dest, ber_dest_ci;
  double p_out, p_out_ci;
  double analytic_ber, analytic_pout;
  double asym_ber, asym_pout;
  uint64_t bits, relay_errors, dest_errors, outages, failed_frames;
  uint64_t frames, symbols_per_frame, seed;
  char protocol[32];
} imprelay_record;

/* One analytic curve row; scheme is "overall", "rank<N>" or "all_bad". */
typedef struct imprelay_curve {
  double snr_db;
  double ber_relay, ber_dest, p_out;
  double asym_ber_relay, asym_ber_dest, asym_pout;
  char scheme[16];
} imprelay_curve;

/* Called after each completed grid point of a sweep. */
typedef void (*imprelay_progress_fn)(double snr_db, void* user);

IMPRELAY_API const char* imprelay_version(void);
IMPRELAY_API const char* imprelay_last_error(void);
/* Parameter named by the last IMPRELAY_CONFIG_ERROR, or "". */
IMPRELAY_API const char* imprelay_last_error_symbol(void);

IMPRELAY_API imprelay_status imprelay_config_create(imprelay_config** out);
IMPRELAY_API void imprelay_config_destroy(imprelay_config* cfg);
IMPRELAY_API imprelay_status imprelay_config_load_file(imprelay_config* cfg, const char* path);
IMPRELAY_API imprelay_status imprelay_config_load_json(imprelay_config* cfg, const char* text);
/* Overrides always take precedence over loaded files. */
IMPRELAY_API imprelay_status imprelay_config_set(imprelay_config* cfg, const char* key,
                                                 const char* value);
IMPRELAY_API imprelay_status imprelay_config_validate(const imprelay_config* cfg);
/* Effective configuration as JSON. Writes at most `cap` bytes including the
 * terminator; `needed` (optional) receives the full size. */
IMPRELAY_API imprelay_status imprelay_config_to_json(const imprelay_config* cfg, char* buf,
                                                     size_t cap, size_t* needed);

IMPRELAY_API imprelay_status imprelay_run_sweep(const imprelay_config* cfg, unsigned workers,
                                                imprelay_progress_fn progress, void* user,
                                                imprelay_result** out);
IMPRELAY_API imprelay_status imprelay_run_analytic(const imprelay_config* cfg,
                                                   imprelay_result** out);
/* Sweep plus per-point z-scores against the analytic curves. */
IMPRELAY_API imprelay_status imprelay_run_compare(const imprelay_config* cfg, unsigned workers,
                                                  imprelay_progress_fn progress, void* user,
                                                  imprelay_result** out);

IMPRELAY_API void imprelay_result_destroy(imprelay_result* res);
IMPRELAY_API imprelay_result_kind imprelay_result_get_kind(const imprelay_result* res);
/* Records for sweep and compare results, curve rows for analytic results. */
IMPRELAY_API size_t imprelay_result_count(const imprelay_result* res);
IMPRELAY_API imprelay_status imprelay_result_get(const imprelay_result* res, size_t index,
                                                 imprelay_record* out);
IMPRELAY_API imprelay_status imprelay_result_get_curve(const imprelay_result* res, size_t index,
                                                       imprelay_curve* out);
/* 1 when every gated comparison passed (compare results only). */
IMPRELAY_API int imprelay_result_passed(const imprelay_result* res);
IMPRELAY_API imprelay_status imprelay_result_to_csv(const imprelay_result* res, char* buf,
                                                    size_t cap, size_t* needed);
/* Writes the CSV table and its <path>.manifest.json sidecar. */
IMPRELAY_API imprelay_status imprelay_result_write(const imprelay_result* res, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* IMPRELAY_IMPRELAY_H */
