/*
 * C interface to the mfdfa library.
 *
 * Objects are opaque handles created by *_create / *_load functions and
 * released with the matching *_destroy. Every fallible call returns an
 * mfdfa_status; on failure mfdfa_last_error() holds a message for the
 * calling thread until its next failing call.
 */
#ifndef MFDFA_MFDFA_H
#define MFDFA_MFDFA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MFDFA_BUILDING_LIBRARY)
#    define MFDFA_API __declspec(dllexport)
#  else
#    define MFDFA_API __declspec(dllimport)
#  endif
#else
#  define MFDFA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mfdfa_status {
    MFDFA_OK = 0,
    MFDFA_ERR_INVALID_ARGUMENT = 1,
    MFDFA_ERR_FORMAT = 2,
    MFDFA_ERR_UNSUPPORTED_CODEC = 3,
    MFDFA_ERR_EMPTY_SIGNAL = 4,
    MFDFA_ERR_BOUNDS = 5,
    MFDFA_ERR_INSUFFICIENT_AUDIO = 6,
    MFDFA_ERR_DATA = 7,
    MFDFA_ERR_DEGENERATE_SEGMENT = 8,
    MFDFA_ERR_INSUFFICIENT_SCALES = 9,
    MFDFA_ERR_NON_CONCAVE_SPECTRUM = 10,
    MFDFA_ERR_INSUFFICIENT_SPECTRUM = 11,
    MFDFA_ERR_CONFIG = 12,
    MFDFA_ERR_SCHEMA = 13,
    MFDFA_ERR_MANIFEST_PARSE = 14,
    MFDFA_ERR_DUPLICATE_ENTRY = 15,
    MFDFA_ERR_MISSING_FILE = 16,
    MFDFA_ERR_IO = 17,
    MFDFA_ERR_RENDITION_FAILED = 18,
    MFDFA_ERR_INTERNAL = 19
} mfdfa_status;

typedef enum mfdfa_width_method {
    MFDFA_WIDTH_QUADRATIC = 0,
    MFDFA_WIDTH_ENDPOINTS = 1
} mfdfa_width_method;

typedef struct mfdfa_signal mfdfa_signal;
typedef struct mfdfa_config mfdfa_config;
typedef struct mfdfa_result mfdfa_result;
typedef struct mfdfa_overrides mfdfa_overrides;
typedef struct mfdfa_manifest mfdfa_manifest;
typedef struct mfdfa_run_summary mfdfa_run_summary;

MFDFA_API const char* mfdfa_version(void);
MFDFA_API const char* mfdfa_status_name(mfdfa_status status);
MFDFA_API const char* mfdfa_last_error(void);

/* Signals */
MFDFA_API mfdfa_status mfdfa_signal_from_samples(const double* samples, size_t count, double sample_rate,
                                                 mfdfa_signal** out);
MFDFA_API mfdfa_status mfdfa_signal_decode_wav(const char* path, mfdfa_signal** out);
MFDFA_API mfdfa_status mfdfa_signal_write_wav_float(const mfdfa_signal* signal, const char* path);
MFDFA_API size_t mfdfa_signal_length(const mfdfa_signal* signal);
MFDFA_API double mfdfa_signal_sample_rate(const mfdfa_signal* signal);
/* Borrowed pointer, valid until the signal is destroyed. */
MFDFA_API const double* mfdfa_signal_samples(const mfdfa_signal* signal);
MFDFA_API void mfdfa_signal_destroy(mfdfa_signal* signal);

/* Synthetic signals */
MFDFA_API mfdfa_status mfdfa_synth_white_noise(size_t n, uint64_t seed, mfdfa_signal** out);
MFDFA_API mfdfa_status mfdfa_synth_fgn(double hurst, size_t n, uint64_t seed, mfdfa_signal** out);
MFDFA_API mfdfa_status mfdfa_synth_binomial_cascade(int levels, double weight, mfdfa_signal** out);
MFDFA_API mfdfa_status mfdfa_synth_shuffle(const mfdfa_signal* signal, uint64_t seed, mfdfa_signal** out);
MFDFA_API double mfdfa_synth_analytic_cascade_h(double q, double weight);
/* Writes the oracle corpus and copies the manifest path into path_buffer
   (truncated to buffer_size, always NUL-terminated when buffer_size > 0). */
MFDFA_API mfdfa_status mfdfa_synth_corpus(const char* directory, size_t generations, double seconds,
                                          double sample_rate, uint64_t seed, size_t part_count,
                                          double window_seconds, char* path_buffer, size_t buffer_size);

/* Analysis configuration; defaults: q in [-5, 5] step 0.25, 20 log-spaced
   scales in [16, N/4], linear detrending, bidirectional, quadratic width. */
MFDFA_API mfdfa_config* mfdfa_config_create(void);
MFDFA_API void mfdfa_config_destroy(mfdfa_config* config);
MFDFA_API mfdfa_status mfdfa_config_set_q_range(mfdfa_config* config, double q_min, double q_max, double q_step);
MFDFA_API mfdfa_status mfdfa_config_set_q_grid(mfdfa_config* config, const double* q, size_t count);
/* max_scale = 0 selects floor(N/4) per series. */
MFDFA_API mfdfa_status mfdfa_config_set_scale_range(mfdfa_config* config, size_t min_scale, size_t max_scale,
                                                    size_t count);
MFDFA_API mfdfa_status mfdfa_config_set_scales(mfdfa_config* config, const size_t* scales, size_t count);
MFDFA_API mfdfa_status mfdfa_config_set_detrend_order(mfdfa_config* config, int order);
MFDFA_API mfdfa_status mfdfa_config_set_bidirectional(mfdfa_config* config, int enabled);
MFDFA_API mfdfa_status mfdfa_config_set_fit_range(mfdfa_config* config, size_t first, size_t last);
MFDFA_API mfdfa_status mfdfa_config_set_width_method(mfdfa_config* config, mfdfa_width_method method);

/* Analysis */
MFDFA_API mfdfa_status mfdfa_analyze(const mfdfa_signal* signal, const mfdfa_config* config, mfdfa_result** out);
MFDFA_API void mfdfa_result_destroy(mfdfa_result* result);
MFDFA_API size_t mfdfa_result_q_count(const mfdfa_result* result);
MFDFA_API size_t mfdfa_result_scale_count(const mfdfa_result* result);
/* Copy min(capacity, count) values; return the full count. */
MFDFA_API size_t mfdfa_result_q_grid(const mfdfa_result* result, double* out, size_t capacity);
MFDFA_API size_t mfdfa_result_scales(const mfdfa_result* result, size_t* out, size_t capacity);
MFDFA_API size_t mfdfa_result_hurst(const mfdfa_result* result, double* out, size_t capacity);
MFDFA_API size_t mfdfa_result_r_squared(const mfdfa_result* result, double* out, size_t capacity);
MFDFA_API size_t mfdfa_result_tau(const mfdfa_result* result, double* out, size_t capacity);
MFDFA_API size_t mfdfa_result_alpha(const mfdfa_result* result, double* out, size_t capacity);
MFDFA_API size_t mfdfa_result_f_alpha(const mfdfa_result* result, double* out, size_t capacity);
/* F_q(s) row for q index qi. */
MFDFA_API size_t mfdfa_result_fluctuation(const mfdfa_result* result, size_t qi, double* out, size_t capacity);
MFDFA_API double mfdfa_result_width(const mfdfa_result* result);
MFDFA_API double mfdfa_result_alpha0(const mfdfa_result* result);
MFDFA_API double mfdfa_result_asymmetry(const mfdfa_result* result);

/* CLI-level overrides layered between manifest defaults and entries.
   Unset numeric arguments: pass NAN (doubles) or 0 (counts). */
MFDFA_API mfdfa_overrides* mfdfa_overrides_create(void);
MFDFA_API void mfdfa_overrides_destroy(mfdfa_overrides* overrides);
MFDFA_API mfdfa_status mfdfa_overrides_set_q_range(mfdfa_overrides* o, double q_min, double q_max, double q_step);
MFDFA_API mfdfa_status mfdfa_overrides_set_scales(mfdfa_overrides* o, size_t min_scale, size_t max_scale, size_t count);
MFDFA_API mfdfa_status mfdfa_overrides_set_detrend_order(mfdfa_overrides* o, int order);
MFDFA_API mfdfa_status mfdfa_overrides_set_width_method(mfdfa_overrides* o, mfdfa_width_method method);
MFDFA_API mfdfa_status mfdfa_overrides_set_parts(mfdfa_overrides* o, size_t part_count);
MFDFA_API mfdfa_status mfdfa_overrides_set_window_seconds(mfdfa_overrides* o, double seconds);

/* Manifests */
MFDFA_API mfdfa_status mfdfa_manifest_load(const char* path, const mfdfa_overrides* cli, mfdfa_manifest** out);
MFDFA_API void mfdfa_manifest_destroy(mfdfa_manifest* manifest);
MFDFA_API size_t mfdfa_manifest_entry_count(const mfdfa_manifest* manifest);
/* Empty string when the manifest does not name one. */
MFDFA_API const char* mfdfa_manifest_output_dir(const mfdfa_manifest* manifest);

/* Runs the corpus. Returns MFDFA_OK when every rendition succeeded,
   MFDFA_ERR_RENDITION_FAILED when some failed (the summary is still
   produced), or another status when the run itself aborted. out_dir may be
   NULL to use the manifest's output_dir or $MFDFA_OUT_DIR. */
MFDFA_API mfdfa_status mfdfa_run(const mfdfa_manifest* manifest, const char* out_dir, size_t jobs, int dry_run,
                                 mfdfa_run_summary** out);
MFDFA_API void mfdfa_run_summary_destroy(mfdfa_run_summary* summary);
MFDFA_API size_t mfdfa_run_summary_renditions(const mfdfa_run_summary* summary);
MFDFA_API size_t mfdfa_run_summary_errored(const mfdfa_run_summary* summary);
MFDFA_API size_t mfdfa_run_summary_diagnostic_count(const mfdfa_run_summary* summary);
MFDFA_API const char* mfdfa_run_summary_diagnostic(const mfdfa_run_summary* summary, size_t index);
MFDFA_API size_t mfdfa_run_summary_file_count(const mfdfa_run_summary* summary);
MFDFA_API const char* mfdfa_run_summary_file(const mfdfa_run_summary* summary, size_t index);

#ifdef __cplusplus
}
#endif

#endif /* MFDFA_MFDFA_H */
