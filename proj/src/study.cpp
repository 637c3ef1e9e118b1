#include "mfdfa/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

namespace mfdfa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> values) {
    if (values.empty()) return kNaN;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

bool is_window_level(ErrorCode code) {
    return code == ErrorCode::DegenerateSegment || code == ErrorCode::Data ||
           code == ErrorCode::InsufficientSpectrum || code == ErrorCode::NonConcaveSpectrum;
}

WindowResult analyze_window(const Signal& window, const MfdfaConfig& config) {
    WindowResult out;
    out.length = window.size();
    MfdfaConfig endpoints = config;
    endpoints.width_method = WidthMethod::SpectrumEndpoints;
    MfdfaResult r;
    try {
        r = analyze(window, endpoints);
    } catch (const Error& e) {
        if (!is_window_level(e.code())) throw;
        out.flagged = true;
        out.error_code = e.code();
        out.error = e.what();
        return out;
    }
    out.width_method = WidthMethod::SpectrumEndpoints;
    WidthResult width = r.width;
    if (config.width_method == WidthMethod::QuadraticFit) {
        try {
            width = spectrum_width(r.spectrum, WidthMethod::QuadraticFit);
            out.width_method = WidthMethod::QuadraticFit;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonConcaveSpectrum) throw;
            out.width_fallback = true;
        }
    }
    const std::size_t q2 = r.hurst.index_of(2.0);
    out.width = width.width;
    out.alpha0 = width.alpha0;
    out.asymmetry = width.asymmetry;
    out.h2 = r.hurst.h[q2];
    out.r2_q2 = r.hurst.r_squared[q2];
    const auto [h_lo, h_hi] = std::minmax_element(r.hurst.h.begin(), r.hurst.h.end());
    out.h_min = *h_lo;
    out.h_max = *h_hi;
    const auto [a_lo, a_hi] = std::minmax_element(r.spectrum.alpha.begin(), r.spectrum.alpha.end());
    out.alpha_min = *a_lo;
    out.alpha_max = *a_hi;
    out.alpha_monotone = r.spectrum.alpha_monotone;
    out.h = r.hurst.h;
    return out;
}

std::vector<GenerationAggregate> aggregate(const std::vector<const RenditionReport*>& reports,
                                           const std::string& song_id) {
    std::map<int, std::vector<const RenditionReport*>> groups;
    std::size_t part_count = 0;
    bool first = true;
    for (const RenditionReport* ptr : reports) {
        const RenditionReport& report = *ptr;
        if (first) {
            part_count = report.parts.size();
            first = false;
        } else if (report.parts.size() != part_count) {
            fail(ErrorCode::Schema, "mixed part counts (" + std::to_string(part_count) + " vs " +
                                        std::to_string(report.parts.size()) + ") at " + report.record.label());
        }
        groups[report.record.generation].push_back(&report);
    }
    std::vector<GenerationAggregate> out;
    for (const auto& [generation, members] : groups) {
        GenerationAggregate agg;
        agg.song_id = song_id;
        agg.generation = generation;
        agg.renditions = members.size();
        std::vector<double> valid_parts;
        for (std::size_t p = 0; p < part_count; ++p) {
            std::vector<double> values;
            for (const RenditionReport* r : members) {
                if (!r->parts[p].errored()) values.push_back(r->parts[p].mean_width);
            }
            const double m = mean_of(values);
            agg.part_means.push_back(m);
            if (!std::isnan(m)) valid_parts.push_back(m);
        }
        agg.overall_mean = mean_of(valid_parts);
        out.push_back(std::move(agg));
    }
    return out;
}

}  // namespace

std::string RenditionRecord::label() const {
    return song_id + " / " + artist + " (" + std::to_string(year) + ")";
}

bool RenditionReport::errored() const noexcept {
    return std::any_of(parts.begin(), parts.end(), [](const PartResult& p) { return p.errored(); });
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    const std::size_t n = std::min(jobs, count);
    threads.reserve(n);
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    // Lowest index wins so the reported error does not depend on scheduling.
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

RenditionReport analyze_signal(const RenditionRecord& record, const Signal& signal, std::size_t jobs) {
    RenditionReport report;
    report.record = record;
    try {
        report.plan = record.plan.resolved(signal.duration());
        const std::vector<Part> parts = partition_windows(signal, report.plan);
        const std::size_t per_part = report.plan.windows_per_part();
        const std::size_t window_samples = parts.front().front().size();
        const auto part_offset = [&](std::size_t p) {
            return static_cast<std::size_t>(std::floor(
                (report.plan.clip_start + static_cast<double>(p) * report.plan.part_length) * signal.sample_rate() + 1e-9));
        };

        std::vector<WindowResult> windows(parts.size() * per_part);
        parallel_for(windows.size(), jobs, [&](std::size_t i) {
            const std::size_t p = i / per_part;
            const std::size_t w = i % per_part;
            WindowResult result = analyze_window(parts[p][w], record.config);
            result.part_index = p;
            result.window_index = w;
            result.start_sample = part_offset(p) + w * window_samples;
            windows[i] = std::move(result);
        });

        std::vector<std::vector<double>> h_sums;
        std::size_t h_count = 0;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            PartResult part;
            part.part_index = p;
            part.window_count = per_part;
            std::vector<double> alpha0;
            std::vector<double> h2;
            for (std::size_t w = 0; w < per_part; ++w) {
                WindowResult& win = windows[p * per_part + w];
                if (win.flagged) {
                    ++part.flagged_count;
                } else {
                    part.window_widths.push_back(win.width);
                    alpha0.push_back(win.alpha0);
                    h2.push_back(win.h2);
                    if (h_sums.empty()) h_sums.assign(1, std::vector<double>(win.h.size(), 0.0));
                    for (std::size_t k = 0; k < win.h.size(); ++k) h_sums[0][k] += win.h[k];
                    ++h_count;
                }
                part.windows.push_back(std::move(win));
            }
            part.mean_width = mean_of(part.window_widths);
            part.mean_alpha0 = mean_of(alpha0);
            part.mean_h2 = mean_of(h2);
            report.parts.push_back(std::move(part));
        }
        if (h_count > 0) {
            HurstCurve mean;
            mean.q_grid = record.config.q_grid;
            mean.h = h_sums[0];
            for (double& v : mean.h) v /= static_cast<double>(h_count);
            mean.intercepts.assign(mean.h.size(), kNaN);
            mean.r_squared.assign(mean.h.size(), kNaN);
            report.mean_hurst = std::move(mean);
        }
    } catch (const DegenerateSegmentError& e) {
        throw DegenerateSegmentError(e.scale(), e.segment(), record.label() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(e.code(), record.label() + ": " + e.what());
    }
    return report;
}

RenditionReport analyze_rendition(const RenditionRecord& record, std::size_t jobs) {
    Signal signal = [&] {
        try {
            return decode_wav(record.audio);
        } catch (const Error& e) {
            throw Error(e.code(), record.label() + ": " + e.what());
        }
    }();
    return analyze_signal(record, signal, jobs);
}

std::vector<GenerationAggregate> aggregate_generation(std::span<const RenditionReport> reports,
                                                      std::string_view song_id) {
    std::vector<const RenditionReport*> selected;
    for (const auto& r : reports) {
        if (r.record.song_id == song_id) selected.push_back(&r);
    }
    return aggregate(selected, std::string(song_id));
}

GenerationTable cross_generation_table(std::span<const RenditionReport> reports) {
    GenerationTable table;
    std::vector<const RenditionReport*> all;
    for (const auto& r : reports) all.push_back(&r);
    for (auto& agg : aggregate(all, reports.empty() ? std::string() : reports.front().record.song_id)) {
        table.generations.push_back(agg.generation);
        table.values.push_back(std::move(agg.part_means));
    }
    return table;
}

}  // namespace mfdfa
