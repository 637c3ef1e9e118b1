#include "mfdfa/mfdfa.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"
#include "mfdfa/runner.hpp"
#include "mfdfa/signal_io.hpp"
#include "mfdfa/synth.hpp"

struct mfdfa_signal {
    mfdfa::Signal value;
};

struct mfdfa_config {
    mfdfa::MfdfaConfig value;
};

struct mfdfa_result {
    mfdfa::MfdfaResult value;
};

struct mfdfa_overrides {
    mfdfa::Overrides value;
};

struct mfdfa_manifest {
    mfdfa::Manifest value;
    std::string output_dir;
};

struct mfdfa_run_summary {
    mfdfa::RunSummary value;
    std::vector<std::string> files;
};

namespace {

thread_local std::string last_error;

mfdfa_status set_error(mfdfa_status status, const std::string& message) {
    last_error = message;
    return status;
}

template <class Fn>
mfdfa_status guard(Fn&& fn) {
    try {
        return fn();
    } catch (const mfdfa::Error& e) {
        return set_error(static_cast<mfdfa_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(MFDFA_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(MFDFA_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(MFDFA_ERR_INTERNAL, "unknown error");
    }
}

mfdfa_status null_argument(const char* what) {
    return set_error(MFDFA_ERR_INVALID_ARGUMENT, std::string("null ") + what);
}

size_t copy_out(const std::vector<double>& values, double* out, size_t capacity) {
    if (out) std::memcpy(out, values.data(), std::min(capacity, values.size()) * sizeof(double));
    return values.size();
}

mfdfa_status wrap_signal(mfdfa::Signal signal, mfdfa_signal** out) {
    *out = new mfdfa_signal{std::move(signal)};
    return MFDFA_OK;
}

mfdfa::WidthMethod to_method(mfdfa_width_method m) {
    if (m == MFDFA_WIDTH_QUADRATIC) return mfdfa::WidthMethod::QuadraticFit;
    if (m == MFDFA_WIDTH_ENDPOINTS) return mfdfa::WidthMethod::SpectrumEndpoints;
    mfdfa::fail(mfdfa::ErrorCode::InvalidArgument, "unknown width method");
}

}  // namespace

extern "C" {

const char* mfdfa_version(void) { return "1.0.0"; }

const char* mfdfa_status_name(mfdfa_status status) {
    return mfdfa::error_code_name(static_cast<mfdfa::ErrorCode>(status));
}

const char* mfdfa_last_error(void) { return last_error.c_str(); }

mfdfa_status mfdfa_signal_from_samples(const double* samples, size_t count, double sample_rate, mfdfa_signal** out) {
    if (!out || (!samples && count > 0)) return null_argument("argument");
    return guard([&] { return wrap_signal(mfdfa::Signal(std::vector<double>(samples, samples + count), sample_rate), out); });
}

mfdfa_status mfdfa_signal_decode_wav(const char* path, mfdfa_signal** out) {
    if (!path || !out) return null_argument("argument");
    return guard([&] { return wrap_signal(mfdfa::decode_wav(path), out); });
}

mfdfa_status mfdfa_signal_write_wav_float(const mfdfa_signal* signal, const char* path) {
    if (!signal || !path) return null_argument("argument");
    return guard([&] {
        mfdfa::write_wav_float(path, signal->value);
        return MFDFA_OK;
    });
}

size_t mfdfa_signal_length(const mfdfa_signal* signal) { return signal ? signal->value.size() : 0; }

double mfdfa_signal_sample_rate(const mfdfa_signal* signal) { return signal ? signal->value.sample_rate() : 0.0; }

const double* mfdfa_signal_samples(const mfdfa_signal* signal) {
    return signal ? signal->value.samples().data() : nullptr;
}

void mfdfa_signal_destroy(mfdfa_signal* signal) { delete signal; }

mfdfa_status mfdfa_synth_white_noise(size_t n, uint64_t seed, mfdfa_signal** out) {
    if (!out) return null_argument("out");
    return guard([&] { return wrap_signal(mfdfa::synth::gen_white_noise(n, seed), out); });
}

mfdfa_status mfdfa_synth_fgn(double hurst, size_t n, uint64_t seed, mfdfa_signal** out) {
    if (!out) return null_argument("out");
    return guard([&] { return wrap_signal(mfdfa::synth::gen_fgn({hurst, n, seed}), out); });
}

mfdfa_status mfdfa_synth_binomial_cascade(int levels, double weight, mfdfa_signal** out) {
    if (!out) return null_argument("out");
    return guard([&] { return wrap_signal(mfdfa::synth::gen_binomial_cascade({levels, weight}), out); });
}

mfdfa_status mfdfa_synth_shuffle(const mfdfa_signal* signal, uint64_t seed, mfdfa_signal** out) {
    if (!signal || !out) return null_argument("argument");
    return guard([&] { return wrap_signal(mfdfa::synth::shuffle(signal->value, seed), out); });
}

double mfdfa_synth_analytic_cascade_h(double q, double weight) {
    try {
        return mfdfa::synth::analytic_cascade_h(q, weight);
    } catch (const mfdfa::Error& e) {
        set_error(static_cast<mfdfa_status>(e.code()), e.what());
        return NAN;
    }
}

mfdfa_status mfdfa_synth_corpus(const char* directory, size_t generations, double seconds, double sample_rate,
                                uint64_t seed, size_t part_count, double window_seconds, char* path_buffer,
                                size_t buffer_size) {
    if (!directory) return null_argument("directory");
    return guard([&] {
        mfdfa::synth::CorpusOptions options;
        options.generations = generations;
        options.seconds = seconds;
        options.sample_rate = sample_rate;
        options.seed = seed;
        options.part_count = part_count;
        options.window_length = window_seconds;
        const std::string path = mfdfa::synth::write_synthetic_corpus(directory, options).string();
        if (path_buffer && buffer_size > 0) {
            const size_t n = std::min(buffer_size - 1, path.size());
            std::memcpy(path_buffer, path.data(), n);
            path_buffer[n] = '\0';
        }
        return MFDFA_OK;
    });
}

mfdfa_config* mfdfa_config_create(void) { return new (std::nothrow) mfdfa_config{}; }

void mfdfa_config_destroy(mfdfa_config* config) { delete config; }

mfdfa_status mfdfa_config_set_q_range(mfdfa_config* config, double q_min, double q_max, double q_step) {
    if (!config) return null_argument("config");
    return guard([&] {
        config->value.q_grid = mfdfa::MfdfaConfig::uniform_q_grid(q_min, q_max, q_step);
        return MFDFA_OK;
    });
}

mfdfa_status mfdfa_config_set_q_grid(mfdfa_config* config, const double* q, size_t count) {
    if (!config || !q) return null_argument("argument");
    config->value.q_grid.assign(q, q + count);
    return MFDFA_OK;
}

mfdfa_status mfdfa_config_set_scale_range(mfdfa_config* config, size_t min_scale, size_t max_scale, size_t count) {
    if (!config) return null_argument("config");
    config->value.scale_grid.clear();
    config->value.scale_min = min_scale;
    config->value.scale_max = max_scale;
    config->value.scale_count = count;
    return MFDFA_OK;
}

mfdfa_status mfdfa_config_set_scales(mfdfa_config* config, const size_t* scales, size_t count) {
    if (!config || !scales) return null_argument("argument");
    config->value.scale_grid.assign(scales, scales + count);
    return MFDFA_OK;
}

mfdfa_status mfdfa_config_set_detrend_order(mfdfa_config* config, int order) {
    if (!config) return null_argument("config");
    if (order < 1) return set_error(MFDFA_ERR_CONFIG, "detrend order must be >= 1");
    config->value.detrend_order = order;
    return MFDFA_OK;
}

mfdfa_status mfdfa_config_set_bidirectional(mfdfa_config* config, int enabled) {
    if (!config) return null_argument("config");
    config->value.bidirectional = enabled != 0;
    return MFDFA_OK;
}

mfdfa_status mfdfa_config_set_fit_range(mfdfa_config* config, size_t first, size_t last) {
    if (!config) return null_argument("config");
    config->value.fit_range = mfdfa::FitRange{first, last};
    return MFDFA_OK;
}

mfdfa_status mfdfa_config_set_width_method(mfdfa_config* config, mfdfa_width_method method) {
    if (!config) return null_argument("config");
    return guard([&] {
        config->value.width_method = to_method(method);
        return MFDFA_OK;
    });
}

mfdfa_status mfdfa_analyze(const mfdfa_signal* signal, const mfdfa_config* config, mfdfa_result** out) {
    if (!signal || !out) return null_argument("argument");
    return guard([&] {
        const mfdfa::MfdfaConfig defaults;
        *out = new mfdfa_result{mfdfa::analyze(signal->value, config ? config->value : defaults)};
        return MFDFA_OK;
    });
}

void mfdfa_result_destroy(mfdfa_result* result) { delete result; }

size_t mfdfa_result_q_count(const mfdfa_result* r) { return r ? r->value.hurst.q_grid.size() : 0; }

size_t mfdfa_result_scale_count(const mfdfa_result* r) { return r ? r->value.surface.scale_grid.size() : 0; }

size_t mfdfa_result_q_grid(const mfdfa_result* r, double* out, size_t capacity) {
    return r ? copy_out(r->value.hurst.q_grid, out, capacity) : 0;
}

size_t mfdfa_result_scales(const mfdfa_result* r, size_t* out, size_t capacity) {
    if (!r) return 0;
    const auto& scales = r->value.surface.scale_grid;
    if (out) std::memcpy(out, scales.data(), std::min(capacity, scales.size()) * sizeof(size_t));
    return scales.size();
}

size_t mfdfa_result_hurst(const mfdfa_result* r, double* out, size_t capacity) {
    return r ? copy_out(r->value.hurst.h, out, capacity) : 0;
}

size_t mfdfa_result_r_squared(const mfdfa_result* r, double* out, size_t capacity) {
    return r ? copy_out(r->value.hurst.r_squared, out, capacity) : 0;
}

size_t mfdfa_result_tau(const mfdfa_result* r, double* out, size_t capacity) {
    return r ? copy_out(r->value.spectrum.tau, out, capacity) : 0;
}

size_t mfdfa_result_alpha(const mfdfa_result* r, double* out, size_t capacity) {
    return r ? copy_out(r->value.spectrum.alpha, out, capacity) : 0;
}

size_t mfdfa_result_f_alpha(const mfdfa_result* r, double* out, size_t capacity) {
    return r ? copy_out(r->value.spectrum.f_alpha, out, capacity) : 0;
}

size_t mfdfa_result_fluctuation(const mfdfa_result* r, size_t qi, double* out, size_t capacity) {
    if (!r || qi >= r->value.surface.values.size()) return 0;
    return copy_out(r->value.surface.values[qi], out, capacity);
}

double mfdfa_result_width(const mfdfa_result* r) { return r ? r->value.width.width : NAN; }

double mfdfa_result_alpha0(const mfdfa_result* r) { return r ? r->value.width.alpha0 : NAN; }

double mfdfa_result_asymmetry(const mfdfa_result* r) { return r ? r->value.width.asymmetry : NAN; }

mfdfa_overrides* mfdfa_overrides_create(void) { return new (std::nothrow) mfdfa_overrides{}; }

void mfdfa_overrides_destroy(mfdfa_overrides* overrides) { delete overrides; }

mfdfa_status mfdfa_overrides_set_q_range(mfdfa_overrides* o, double q_min, double q_max, double q_step) {
    if (!o) return null_argument("overrides");
    auto& a = o->value.analysis;
    a.q_grid.reset();
    a.q_min = std::isnan(q_min) ? std::nullopt : std::optional<double>(q_min);
    a.q_max = std::isnan(q_max) ? std::nullopt : std::optional<double>(q_max);
    a.q_step = std::isnan(q_step) ? std::nullopt : std::optional<double>(q_step);
    return MFDFA_OK;
}

mfdfa_status mfdfa_overrides_set_scales(mfdfa_overrides* o, size_t min_scale, size_t max_scale, size_t count) {
    if (!o) return null_argument("overrides");
    auto& a = o->value.analysis;
    a.scales.reset();
    a.scale_min = min_scale ? std::optional<std::size_t>(min_scale) : std::nullopt;
    // 0 keeps the floor(N/4) default but still marks the group as set.
    a.scale_max = max_scale;
    a.scale_count = count ? std::optional<std::size_t>(count) : std::nullopt;
    return MFDFA_OK;
}

mfdfa_status mfdfa_overrides_set_detrend_order(mfdfa_overrides* o, int order) {
    if (!o) return null_argument("overrides");
    if (order < 1) return set_error(MFDFA_ERR_CONFIG, "detrend order must be >= 1");
    o->value.analysis.detrend_order = order;
    return MFDFA_OK;
}

mfdfa_status mfdfa_overrides_set_width_method(mfdfa_overrides* o, mfdfa_width_method method) {
    if (!o) return null_argument("overrides");
    return guard([&] {
        o->value.analysis.width_method = to_method(method);
        return MFDFA_OK;
    });
}

mfdfa_status mfdfa_overrides_set_parts(mfdfa_overrides* o, size_t part_count) {
    if (!o) return null_argument("overrides");
    if (part_count == 0) return set_error(MFDFA_ERR_CONFIG, "part count must be >= 1");
    o->value.plan.part_count = part_count;
    return MFDFA_OK;
}

mfdfa_status mfdfa_overrides_set_window_seconds(mfdfa_overrides* o, double seconds) {
    if (!o) return null_argument("overrides");
    if (!(seconds > 0.0)) return set_error(MFDFA_ERR_CONFIG, "window length must be > 0");
    o->value.plan.window_length = seconds;
    return MFDFA_OK;
}

mfdfa_status mfdfa_manifest_load(const char* path, const mfdfa_overrides* cli, mfdfa_manifest** out) {
    if (!path || !out) return null_argument("argument");
    return guard([&] {
        const mfdfa::Overrides none;
        mfdfa::Manifest m = mfdfa::validate_manifest(path, cli ? cli->value : none);
        std::string dir = m.output_dir.string();
        *out = new mfdfa_manifest{std::move(m), std::move(dir)};
        return MFDFA_OK;
    });
}

void mfdfa_manifest_destroy(mfdfa_manifest* manifest) { delete manifest; }

size_t mfdfa_manifest_entry_count(const mfdfa_manifest* m) { return m ? m->value.entries.size() : 0; }

const char* mfdfa_manifest_output_dir(const mfdfa_manifest* m) { return m ? m->output_dir.c_str() : ""; }

mfdfa_status mfdfa_run(const mfdfa_manifest* manifest, const char* out_dir, size_t jobs, int dry_run,
                       mfdfa_run_summary** out) {
    if (!manifest || !out) return null_argument("argument");
    return guard([&] {
        mfdfa::RunOptions options;
        if (out_dir) options.out_dir = out_dir;
        options.jobs = jobs;
        options.dry_run = dry_run != 0;
        auto* summary = new mfdfa_run_summary{mfdfa::run(manifest->value, options), {}};
        for (const auto& f : summary->value.files) summary->files.push_back(f.string());
        *out = summary;
        if (summary->value.errored > 0) {
            return set_error(MFDFA_ERR_RENDITION_FAILED,
                             std::to_string(summary->value.errored) + " rendition(s) errored");
        }
        return MFDFA_OK;
    });
}

void mfdfa_run_summary_destroy(mfdfa_run_summary* summary) { delete summary; }

size_t mfdfa_run_summary_renditions(const mfdfa_run_summary* s) { return s ? s->value.renditions : 0; }

size_t mfdfa_run_summary_errored(const mfdfa_run_summary* s) { return s ? s->value.errored : 0; }

size_t mfdfa_run_summary_diagnostic_count(const mfdfa_run_summary* s) { return s ? s->value.diagnostics.size() : 0; }

const char* mfdfa_run_summary_diagnostic(const mfdfa_run_summary* s, size_t index) {
    if (!s || index >= s->value.diagnostics.size()) return nullptr;
    return s->value.diagnostics[index].c_str();
}

size_t mfdfa_run_summary_file_count(const mfdfa_run_summary* s) { return s ? s->files.size() : 0; }

const char* mfdfa_run_summary_file(const mfdfa_run_summary* s, size_t index) {
    if (!s || index >= s->files.size()) return nullptr;
    return s->files[index].c_str();
}

}  // extern "C"
