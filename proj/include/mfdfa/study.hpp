#pragma once

// Corpus study protocol: per-window MFDFA, per-part averages and
// per-generation aggregation.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"
#include "mfdfa/signal_io.hpp"

namespace mfdfa {

struct RenditionRecord {
    std::string song_id;
    std::string artist;
    int year = 2000;
    int generation = 1;
    std::filesystem::path audio;
    WindowPlan plan;
    MfdfaConfig config;
    /// 1-based manifest line, 0 when not from a manifest.
    int source_line = 0;

    /// "song / artist (year)"
    std::string label() const;
};

struct WindowResult {
    /// 0-based here; CSV output is 1-based.
    std::size_t part_index = 0;
    std::size_t window_index = 0;
    std::size_t start_sample = 0;
    std::size_t length = 0;
    bool flagged = false;
    ErrorCode error_code = ErrorCode::Ok;
    std::string error;
    double width = 0.0;
    double alpha0 = 0.0;
    double asymmetry = 0.0;
    double h2 = 0.0;
    double r2_q2 = 0.0;
    double h_min = 0.0;
    double h_max = 0.0;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    bool alpha_monotone = true;
    WidthMethod width_method = WidthMethod::QuadraticFit;
    /// Quadratic fit was non-concave; width is the endpoints value.
    bool width_fallback = false;
    std::vector<double> h;
};

struct PartResult {
    std::size_t part_index = 0;
    /// Widths of included (unflagged) windows, in window order.
    std::vector<double> window_widths;
    double mean_width = 0.0;
    double mean_alpha0 = 0.0;
    double mean_h2 = 0.0;
    std::size_t window_count = 0;
    std::size_t flagged_count = 0;
    std::vector<WindowResult> windows;

    bool errored() const noexcept { return window_widths.empty(); }
};

struct RenditionReport {
    RenditionRecord record;
    WindowPlan plan;
    std::vector<PartResult> parts;
    /// h(q) averaged over every included window; empty if none.
    std::optional<HurstCurve> mean_hurst;

    bool errored() const noexcept;
};

struct GenerationAggregate {
    std::string song_id;
    int generation = 1;
    std::size_t renditions = 0;
    /// NaN where no rendition of the generation has a value for the part.
    std::vector<double> part_means;
    double overall_mean = 0.0;
};

/// Rows ordered by ascending generation, columns by part.
struct GenerationTable {
    std::vector<int> generations;
    std::vector<std::vector<double>> values;
};

/// Decodes the record's audio and analyzes it. Audio and plan errors are
/// rethrown with the record's label prepended.
RenditionReport analyze_rendition(const RenditionRecord& record, std::size_t jobs = 1);
RenditionReport analyze_signal(const RenditionRecord& record, const Signal& signal,
                               std::size_t jobs = 1);

std::vector<GenerationAggregate> aggregate_generation(std::span<const RenditionReport> reports,
                                                      std::string_view song_id);

GenerationTable cross_generation_table(std::span<const RenditionReport> reports);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace mfdfa
