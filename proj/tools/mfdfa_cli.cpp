// mfdfa: batch multifractal width analysis over a manifest of renditions.
//
//   mfdfa --manifest corpus.yaml --out results --jobs 4
//   mfdfa synth --out corpus
//
// Links only the C API in libmfdfa. Exit status: 0 success, 1 some
// rendition errored, 2 usage, manifest or I/O error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfdfa/mfdfa.h"

namespace {

struct ScaleSpec {
    size_t min = 0;
    size_t max = 0;
    size_t count = 0;
};

// MIN:MAX:COUNT, MAX may be "auto" or 0 for floor(N/4).
std::optional<ScaleSpec> parse_scales(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ':');) parts.push_back(item);
    if (parts.size() != 3) return std::nullopt;
    ScaleSpec spec;
    try {
        size_t used = 0;
        spec.min = std::stoul(parts[0], &used);
        if (used != parts[0].size()) return std::nullopt;
        if (parts[1] == "auto") {
            spec.max = 0;
        } else {
            spec.max = std::stoul(parts[1], &used);
            if (used != parts[1].size()) return std::nullopt;
        }
        spec.count = std::stoul(parts[2], &used);
        if (used != parts[2].size()) return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (spec.min == 0 || spec.count == 0) return std::nullopt;
    return spec;
}

int report(mfdfa_status status, const std::string& context) {
    std::cerr << "mfdfa: " << context << ": " << mfdfa_status_name(status) << ": " << mfdfa_last_error() << "\n";
    return status == MFDFA_ERR_RENDITION_FAILED ? 1 : 2;
}

using OverridesPtr = std::unique_ptr<mfdfa_overrides, decltype(&mfdfa_overrides_destroy)>;
using ManifestPtr = std::unique_ptr<mfdfa_manifest, decltype(&mfdfa_manifest_destroy)>;
using SummaryPtr = std::unique_ptr<mfdfa_run_summary, decltype(&mfdfa_run_summary_destroy)>;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multifractal (MFDFA) width analysis of audio renditions"};
    app.set_version_flag("--version", std::string(mfdfa_version()));

    std::string manifest_path;
    std::string out_dir;
    size_t jobs = 1;
    bool dry_run = false;
    std::optional<double> q_min, q_max, q_step;
    std::string scales_text;
    std::optional<int> detrend_order;
    std::string width_method;
    std::optional<size_t> parts;
    std::optional<double> window_seconds;

    app.add_option("--manifest", manifest_path, "corpus manifest (YAML)")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: manifest output_dir, $MFDFA_OUT_DIR, mfdfa_out)");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(size_t{1}, size_t{1024}));
    app.add_flag("--dry-run", dry_run, "validate the manifest only; write nothing");
    app.add_option("--q-min", q_min, "smallest moment order");
    app.add_option("--q-max", q_max, "largest moment order");
    app.add_option("--q-step", q_step, "moment order spacing");
    app.add_option("--scales", scales_text, "MIN:MAX:COUNT log-spaced scales (MAX may be auto)");
    app.add_option("--detrend-order", detrend_order, "polynomial detrending order")->check(CLI::PositiveNumber);
    app.add_option("--width-method", width_method, "quadratic|endpoints")
        ->check(CLI::IsMember({"quadratic", "endpoints"}));
    app.add_option("--parts", parts, "parts per clip")->check(CLI::PositiveNumber);
    app.add_option("--window-seconds", window_seconds, "analysis window length")->check(CLI::PositiveNumber);

    auto* synth = app.add_subcommand("synth", "write the synthetic oracle corpus");
    std::string synth_out = "synth_corpus";
    size_t generations = 5;
    double seconds = 180.0;
    double rate = 22050.0;
    uint64_t seed = 1;
    size_t synth_parts = 6;
    double synth_window = 6.0;
    synth->add_option("--out", synth_out, "corpus directory");
    synth->add_option("--generations", generations)->check(CLI::PositiveNumber);
    synth->add_option("--seconds", seconds, "length of each rendition")->check(CLI::PositiveNumber);
    synth->add_option("--rate", rate, "sample rate")->check(CLI::PositiveNumber);
    synth->add_option("--seed", seed);
    synth->add_option("--parts", synth_parts)->check(CLI::PositiveNumber);
    synth->add_option("--window-seconds", synth_window)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (synth->parsed()) {
        char path[4096];
        const mfdfa_status st = mfdfa_synth_corpus(synth_out.c_str(), generations, seconds, rate, seed, synth_parts,
                                                   synth_window, path, sizeof path);
        if (st != MFDFA_OK) return report(st, "synth");
        std::cout << path << "\n";
        return 0;
    }

    if (manifest_path.empty()) {
        std::cerr << "mfdfa: --manifest is required\n" << app.help();
        return 2;
    }

    OverridesPtr cli(mfdfa_overrides_create(), &mfdfa_overrides_destroy);
    if (!cli) return report(MFDFA_ERR_INTERNAL, "overrides");
    mfdfa_status st = MFDFA_OK;
    if (q_min || q_max || q_step) {
        st = mfdfa_overrides_set_q_range(cli.get(), q_min.value_or(NAN), q_max.value_or(NAN), q_step.value_or(NAN));
        if (st != MFDFA_OK) return report(st, "--q-*");
    }
    if (!scales_text.empty()) {
        const auto spec = parse_scales(scales_text);
        if (!spec) {
            std::cerr << "mfdfa: --scales expects MIN:MAX:COUNT, got '" << scales_text << "'\n";
            return 2;
        }
        st = mfdfa_overrides_set_scales(cli.get(), spec->min, spec->max, spec->count);
        if (st != MFDFA_OK) return report(st, "--scales");
    }
    if (detrend_order && (st = mfdfa_overrides_set_detrend_order(cli.get(), *detrend_order)) != MFDFA_OK)
        return report(st, "--detrend-order");
    if (!width_method.empty()) {
        const auto m = width_method == "quadratic" ? MFDFA_WIDTH_QUADRATIC : MFDFA_WIDTH_ENDPOINTS;
        if ((st = mfdfa_overrides_set_width_method(cli.get(), m)) != MFDFA_OK) return report(st, "--width-method");
    }
    if (parts && (st = mfdfa_overrides_set_parts(cli.get(), *parts)) != MFDFA_OK) return report(st, "--parts");
    if (window_seconds && (st = mfdfa_overrides_set_window_seconds(cli.get(), *window_seconds)) != MFDFA_OK)
        return report(st, "--window-seconds");

    mfdfa_manifest* raw_manifest = nullptr;
    st = mfdfa_manifest_load(manifest_path.c_str(), cli.get(), &raw_manifest);
    if (st != MFDFA_OK) return report(st, manifest_path);
    ManifestPtr manifest(raw_manifest, &mfdfa_manifest_destroy);

    mfdfa_run_summary* raw_summary = nullptr;
    st = mfdfa_run(manifest.get(), out_dir.empty() ? nullptr : out_dir.c_str(), jobs, dry_run ? 1 : 0, &raw_summary);
    SummaryPtr summary(raw_summary, &mfdfa_run_summary_destroy);
    if (!summary) return report(st, manifest_path);

    for (size_t i = 0; i < mfdfa_run_summary_diagnostic_count(summary.get()); ++i)
        std::cerr << mfdfa_run_summary_diagnostic(summary.get(), i) << "\n";
    if (dry_run) {
        std::cerr << "manifest ok: " << mfdfa_manifest_entry_count(manifest.get()) << " entries\n";
        return 0;
    }
    for (size_t i = 0; i < mfdfa_run_summary_file_count(summary.get()); ++i)
        std::cout << mfdfa_run_summary_file(summary.get(), i) << "\n";
    const size_t errored = mfdfa_run_summary_errored(summary.get());
    if (errored > 0) {
        std::cerr << "mfdfa: " << errored << " of " << mfdfa_run_summary_renditions(summary.get())
                  << " renditions errored\n";
        return 1;
    }
    return 0;
}
