#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "mfdfa/runner.hpp"

namespace mfdfa {

namespace {

// Locale-independent number formatting. NaN is written as NA.
std::string format_double(double v, int digits, std::chars_format style) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, style, digits);
    return std::string(buf, res.ptr);
}

std::string exact(double v) { return format_double(v, 17, std::chars_format::general); }
std::string fixed4(double v) { return format_double(v, 4, std::chars_format::fixed); }

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

std::optional<double> parse_optional_double(const std::string& text) {
    if (text == "NA") return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        fail(ErrorCode::Schema, "not a number: '" + text + "'");
    }
    return v;
}

template <class T>
T parse_integer(const std::string& text) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        fail(ErrorCode::Schema, "not an integer: '" + text + "'");
    }
    return v;
}

std::string record_columns(const RenditionRecord& r) {
    return quote(r.song_id) + "," + quote(r.artist) + "," + std::to_string(r.year) + "," + std::to_string(r.generation);
}

const char* window_method_text(const WindowResult& w) {
    if (w.flagged) return "";
    if (w.width_fallback) return "endpoints-fallback";
    return width_method_name(w.width_method);
}

// Songs in order of first appearance, each with its reports.
std::vector<std::pair<std::string, std::vector<RenditionReport>>> by_song(std::span<const RenditionReport> reports) {
    std::vector<std::pair<std::string, std::vector<RenditionReport>>> songs;
    for (const auto& r : reports) {
        auto it = std::find_if(songs.begin(), songs.end(), [&](const auto& s) { return s.first == r.record.song_id; });
        if (it == songs.end()) {
            songs.emplace_back(r.record.song_id, std::vector<RenditionReport>{});
            it = std::prev(songs.end());
        }
        it->second.push_back(r);
    }
    return songs;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

std::filesystem::path default_out_dir(const Manifest& manifest, const RunOptions& options) {
    if (!options.out_dir.empty()) return options.out_dir;
    if (!manifest.output_dir.empty()) return manifest.output_dir;
    if (const char* env = std::getenv("MFDFA_OUT_DIR"); env && *env) return env;
    return "mfdfa_out";
}

}  // namespace

std::string sanitize_id(std::string_view text) {
    std::string out;
    for (char c : text) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
        out += ok ? c : '_';
    }
    return out.empty() ? std::string("_") : out;
}

void write_widths_csv(std::ostream& out, std::span<const RenditionReport> reports) {
    out << "song_id,artist,year,generation,part,mean_width,mean_alpha0,mean_h2,window_count,flagged_count\n";
    for (const auto& report : reports) {
        for (const auto& part : report.parts) {
            out << record_columns(report.record) << ',' << part.part_index + 1 << ',' << fixed4(part.mean_width) << ','
                << fixed4(part.mean_alpha0) << ',' << fixed4(part.mean_h2) << ',' << part.window_count << ','
                << part.flagged_count << '\n';
        }
    }
}

void write_windows_csv(std::ostream& out, std::span<const RenditionReport> reports) {
    out << "song_id,artist,year,generation,part,window,start_sample,samples,status,width_method,width,alpha0,"
           "asymmetry,h2,r2_q2,h_min,h_max,alpha_min,alpha_max,alpha_monotone,error\n";
    for (const auto& report : reports) {
        for (const auto& part : report.parts) {
            for (const auto& w : part.windows) {
                out << record_columns(report.record) << ',' << w.part_index + 1 << ',' << w.window_index + 1 << ','
                    << w.start_sample << ',' << w.length << ',' << (w.flagged ? "flagged" : "ok") << ','
                    << window_method_text(w) << ',';
                if (w.flagged) {
                    out << "NA,NA,NA,NA,NA,NA,NA,NA,NA,NA," << quote(w.error) << '\n';
                    continue;
                }
                out << exact(w.width) << ',' << exact(w.alpha0) << ',' << exact(w.asymmetry) << ',' << exact(w.h2) << ','
                    << exact(w.r2_q2) << ',' << exact(w.h_min) << ',' << exact(w.h_max) << ',' << exact(w.alpha_min)
                    << ',' << exact(w.alpha_max) << ',' << (w.alpha_monotone ? 1 : 0) << ",\n";
            }
        }
    }
}

void write_generations_csv(std::ostream& out, std::span<const RenditionReport> reports) {
    out << "song_id,generation,renditions,part,mean_width\n";
    for (const auto& [song, members] : by_song(reports)) {
        for (const auto& agg : aggregate_generation(members, song)) {
            for (std::size_t p = 0; p < agg.part_means.size(); ++p) {
                out << quote(song) << ',' << agg.generation << ',' << agg.renditions << ',' << p + 1 << ','
                    << exact(agg.part_means[p]) << '\n';
            }
            out << quote(song) << ',' << agg.generation << ',' << agg.renditions << ",all," << exact(agg.overall_mean)
                << '\n';
        }
    }
}

void write_spectrum_csv(std::ostream& out, const HurstCurve& curve) {
    const SingularitySpectrum spectrum = legendre_spectrum(curve);
    out << "q,h,tau,alpha,f_alpha\n";
    for (std::size_t i = 0; i < curve.q_grid.size(); ++i) {
        out << exact(curve.q_grid[i]) << ',' << exact(curve.h[i]) << ',' << exact(spectrum.tau[i]) << ','
            << exact(spectrum.alpha[i]) << ',' << exact(spectrum.f_alpha[i]) << '\n';
    }
}

void write_plot_csv(std::ostream& out, std::span<const RenditionReport> reports) {
    out << "song_id,generation,part,mean_width\n";
    for (const auto& [song, members] : by_song(reports)) {
        const GenerationTable table = cross_generation_table(members);
        for (std::size_t g = 0; g < table.generations.size(); ++g) {
            for (std::size_t p = 0; p < table.values[g].size(); ++p) {
                out << quote(song) << ',' << table.generations[g] << ',' << p + 1 << ',' << exact(table.values[g][p])
                    << '\n';
            }
        }
    }
}

std::vector<std::filesystem::path> emit_plot_data(std::span<const RenditionReport> reports,
                                                  const std::filesystem::path& out_dir) {
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    std::set<std::string> used;
    for (const auto& [song, members] : by_song(reports)) {
        std::string name = "plot_" + sanitize_id(song);
        for (int n = 2; used.count(name); ++n) name = "plot_" + sanitize_id(song) + "_" + std::to_string(n);
        used.insert(name);
        std::ostringstream os;
        write_plot_csv(os, members);
        files.emplace_back(out_dir / (name + ".csv"), os.str());
    }
    std::ostringstream all;
    write_plot_csv(all, reports);
    files.emplace_back(out_dir / "plot_all.csv", all.str());

    std::vector<std::filesystem::path> written;
    for (const auto& [path, text] : files) {
        write_text_file(path, text);
        written.push_back(path);
    }
    return written;
}

std::vector<WidthRow> read_widths_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::Schema, "widths.csv is empty");
    if (line != "song_id,artist,year,generation,part,mean_width,mean_alpha0,mean_h2,window_count,flagged_count") {
        fail(ErrorCode::Schema, "unexpected widths.csv header");
    }
    std::vector<WidthRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 10) fail(ErrorCode::Schema, "widths.csv row has " + std::to_string(f.size()) + " fields");
        WidthRow row;
        row.song_id = f[0];
        row.artist = f[1];
        row.year = parse_integer<int>(f[2]);
        row.generation = parse_integer<int>(f[3]);
        row.part = parse_integer<std::size_t>(f[4]);
        row.mean_width = parse_optional_double(f[5]);
        row.mean_alpha0 = parse_optional_double(f[6]);
        row.mean_h2 = parse_optional_double(f[7]);
        row.window_count = parse_integer<std::size_t>(f[8]);
        row.flagged_count = parse_integer<std::size_t>(f[9]);
        rows.push_back(std::move(row));
    }
    return rows;
}

RunSummary run(const Manifest& manifest, const RunOptions& options) {
    RunSummary summary;
    summary.renditions = manifest.entries.size();
    if (options.dry_run) return summary;

    for (const auto& record : manifest.entries) {
        try {
            RenditionReport report = analyze_rendition(record, std::max<std::size_t>(options.jobs, 1));
            for (const auto& part : report.parts) {
                for (const auto& w : part.windows) {
                    if (!w.flagged) continue;
                    summary.diagnostics.push_back((part.errored() ? "error: " : "warning: ") + record.label() +
                                                  ": part " + std::to_string(part.part_index + 1) + " window " +
                                                  std::to_string(w.window_index + 1) + " flagged [" +
                                                  error_code_name(w.error_code) + "]: " + w.error);
                }
            }
            if (report.errored()) ++summary.errored;
            summary.reports.push_back(std::move(report));
        } catch (const Error& e) {
            ++summary.errored;
            summary.diagnostics.push_back(std::string("error: [") + error_code_name(e.code()) + "] " + e.what());
        }
    }

    // Render everything before touching the disk so a schema error leaves no partial output.
    std::vector<std::pair<std::string, std::string>> files;
    {
        std::ostringstream widths, windows, generations;
        write_widths_csv(widths, summary.reports);
        write_windows_csv(windows, summary.reports);
        write_generations_csv(generations, summary.reports);
        files.emplace_back("widths.csv", widths.str());
        files.emplace_back("windows.csv", windows.str());
        files.emplace_back("generations.csv", generations.str());
    }
    std::set<std::string> used;
    for (const auto& report : summary.reports) {
        const RenditionRecord& r = report.record;
        if (!report.mean_hurst) {
            summary.diagnostics.push_back("warning: " + r.label() + ": no spectrum file, every window flagged");
            continue;
        }
        std::string name = "spectrum_" + sanitize_id(r.song_id + "_" + r.artist + "_" + std::to_string(r.year));
        const std::string stem = name;
        for (int n = 2; used.count(name); ++n) name = stem + "_" + std::to_string(n);
        used.insert(name);
        std::ostringstream os;
        write_spectrum_csv(os, *report.mean_hurst);
        files.emplace_back(name + ".csv", os.str());
    }

    const std::filesystem::path out_dir = default_out_dir(manifest, options);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory " + out_dir.string() + ": " + ec.message());
    for (const auto& [name, text] : files) {
        write_text_file(out_dir / name, text);
        summary.files.push_back(out_dir / name);
    }
    for (auto& path : emit_plot_data(summary.reports, out_dir)) summary.files.push_back(std::move(path));
    return summary;
}

}  // namespace mfdfa
