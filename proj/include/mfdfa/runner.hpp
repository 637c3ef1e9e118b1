#pragma once

// Batch front end: manifest parsing, corpus runs and CSV emission.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"
#include "mfdfa/study.hpp"

namespace mfdfa {

inline constexpr int kManifestVersion = 1;

/// Partial WindowPlan; unset fields defer to lower layers.
struct PlanOverrides {
    std::optional<double> clip_start;
    std::optional<double> clip_length;
    std::optional<std::size_t> part_count;
    std::optional<double> part_length;
    std::optional<double> window_length;

    void merge(const PlanOverrides& higher);
    void apply(WindowPlan& plan) const;
};

/// Partial MfdfaConfig. The q fields and the scale fields each form a
/// group: a layer that sets any field of a group replaces that whole group.
struct AnalysisOverrides {
    std::optional<std::vector<double>> q_grid;
    std::optional<double> q_min;
    std::optional<double> q_max;
    std::optional<double> q_step;
    std::optional<std::vector<std::size_t>> scales;
    std::optional<std::size_t> scale_min;
    std::optional<std::size_t> scale_max;
    std::optional<std::size_t> scale_count;
    std::optional<int> detrend_order;
    std::optional<bool> bidirectional;
    std::optional<FitRange> fit_range;
    std::optional<WidthMethod> width_method;
    std::optional<double> q_zero_epsilon;

    bool sets_q() const;
    bool sets_scales() const;
    void merge(const AnalysisOverrides& higher);
    void apply(MfdfaConfig& config) const;
};

struct Overrides {
    PlanOverrides plan;
    AnalysisOverrides analysis;

    void merge(const Overrides& higher);
};

struct Manifest {
    std::filesystem::path source;
    int version = kManifestVersion;
    /// Empty when the manifest does not name one.
    std::filesystem::path output_dir;
    std::vector<RenditionRecord> entries;
};

struct ManifestIssue {
    int line = 0;
    ErrorCode code = ErrorCode::ManifestParse;
    std::string message;
};

/// Every problem found in a manifest; code() is the first issue's code.
class ManifestError : public Error {
public:
    explicit ManifestError(std::vector<ManifestIssue> issues);
    const std::vector<ManifestIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ManifestIssue> issues_;
};

/// Parses a YAML manifest, layering built-in defaults < manifest defaults
/// < cli < per-entry settings. Relative audio paths resolve against the
/// manifest's directory.
Manifest validate_manifest(const std::filesystem::path& path, const Overrides& cli = {});
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir,
                        const Overrides& cli = {}, bool check_files = true);

struct RunOptions {
    std::filesystem::path out_dir;
    std::size_t jobs = 1;
    bool dry_run = false;
};

struct RunSummary {
    std::size_t renditions = 0;
    std::size_t errored = 0;
    std::vector<std::string> diagnostics;
    std::vector<std::filesystem::path> files;
    std::vector<RenditionReport> reports;

    int exit_status() const noexcept { return errored == 0 ? 0 : 1; }
};

RunSummary run(const Manifest& manifest, const RunOptions& options);

/// Writes plot_<song>.csv per song and plot_all.csv; returns paths written.
std::vector<std::filesystem::path> emit_plot_data(std::span<const RenditionReport> reports,
                                                  const std::filesystem::path& out_dir);

void write_widths_csv(std::ostream& out, std::span<const RenditionReport> reports);
void write_windows_csv(std::ostream& out, std::span<const RenditionReport> reports);
void write_generations_csv(std::ostream& out, std::span<const RenditionReport> reports);
void write_spectrum_csv(std::ostream& out, const HurstCurve& curve);
void write_plot_csv(std::ostream& out, std::span<const RenditionReport> reports);

struct WidthRow {
    std::string song_id;
    std::string artist;
    int year = 0;
    int generation = 0;
    std::size_t part = 0;
    std::optional<double> mean_width;
    std::optional<double> mean_alpha0;
    std::optional<double> mean_h2;
    std::size_t window_count = 0;
    std::size_t flagged_count = 0;

    friend bool operator==(const WidthRow&, const WidthRow&) = default;
};

std::vector<WidthRow> read_widths_csv(std::istream& in);

/// File-name-safe form: [A-Za-z0-9_-], everything else becomes '_'.
std::string sanitize_id(std::string_view text);

}  // namespace mfdfa
