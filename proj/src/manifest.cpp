#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "mfdfa/runner.hpp"

namespace mfdfa {

namespace {

int line_of(const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    return mark.is_null() ? 0 : mark.line + 1;
}

std::string issues_text(const std::vector<ManifestIssue>& issues) {
    std::ostringstream os;
    os << "manifest has " << issues.size() << (issues.size() == 1 ? " problem" : " problems");
    for (const auto& issue : issues) {
        os << "\n  line " << issue.line << ": [" << error_code_name(issue.code) << "] " << issue.message;
    }
    return os.str();
}

class Reader {
public:
    std::vector<ManifestIssue> issues;

    void report(const YAML::Node& node, ErrorCode code, const std::string& message) {
        issues.push_back(ManifestIssue{line_of(node), code, message});
    }

    template <class T>
    std::optional<T> scalar(const YAML::Node& map, const char* key) {
        const YAML::Node node = map[key];
        if (!node) return std::nullopt;
        if (!node.IsScalar()) {
            report(node, ErrorCode::ManifestParse, std::string("'") + key + "' must be a scalar");
            return std::nullopt;
        }
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            report(node, ErrorCode::ManifestParse, std::string("'") + key + "' has the wrong type: '" + node.Scalar() + "'");
            return std::nullopt;
        }
    }

    template <class T>
    std::optional<std::vector<T>> sequence(const YAML::Node& map, const char* key) {
        const YAML::Node node = map[key];
        if (!node) return std::nullopt;
        if (!node.IsSequence()) {
            report(node, ErrorCode::ManifestParse, std::string("'") + key + "' must be a list");
            return std::nullopt;
        }
        std::vector<T> out;
        for (const auto& item : node) {
            try {
                out.push_back(item.as<T>());
            } catch (const YAML::Exception&) {
                report(item, ErrorCode::ManifestParse, std::string("'") + key + "' has an element of the wrong type");
                return std::nullopt;
            }
        }
        return out;
    }

    void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) report(kv.first, ErrorCode::ManifestParse, "unknown key '" + key + "' in " + where);
        }
    }

    bool is_map(const YAML::Node& node, const std::string& what) {
        if (node.IsMap()) return true;
        report(node, ErrorCode::ManifestParse, what + " must be a mapping");
        return false;
    }

    PlanOverrides plan(const YAML::Node& node) {
        PlanOverrides out;
        if (!node || !is_map(node, "window_plan")) return out;
        check_keys(node, {"clip_start", "clip_length", "part_count", "part_length", "window_length"}, "window_plan");
        out.clip_start = scalar<double>(node, "clip_start");
        out.clip_length = scalar<double>(node, "clip_length");
        if (auto count = scalar<long long>(node, "part_count")) {
            if (*count < 1) report(node["part_count"], ErrorCode::Config, "part_count must be >= 1");
            else out.part_count = static_cast<std::size_t>(*count);
        }
        out.part_length = scalar<double>(node, "part_length");
        out.window_length = scalar<double>(node, "window_length");
        return out;
    }

    AnalysisOverrides analysis(const YAML::Node& node) {
        AnalysisOverrides out;
        if (!node || !is_map(node, "analysis")) return out;
        check_keys(node,
                   {"q_grid", "q_min", "q_max", "q_step", "scales", "scale_min", "scale_max", "scale_count",
                    "detrend_order", "bidirectional", "fit_range", "width_method", "q_zero_epsilon"},
                   "analysis");
        out.q_grid = sequence<double>(node, "q_grid");
        out.q_min = scalar<double>(node, "q_min");
        out.q_max = scalar<double>(node, "q_max");
        out.q_step = scalar<double>(node, "q_step");
        out.scales = sequence<std::size_t>(node, "scales");
        out.scale_min = scalar<std::size_t>(node, "scale_min");
        out.scale_max = scalar<std::size_t>(node, "scale_max");
        out.scale_count = scalar<std::size_t>(node, "scale_count");
        out.detrend_order = scalar<int>(node, "detrend_order");
        out.bidirectional = scalar<bool>(node, "bidirectional");
        if (auto range = sequence<std::size_t>(node, "fit_range")) {
            if (range->size() != 2) report(node["fit_range"], ErrorCode::ManifestParse, "fit_range must be [first, last]");
            else out.fit_range = FitRange{(*range)[0], (*range)[1]};
        }
        if (auto method = scalar<std::string>(node, "width_method")) {
            if (auto parsed = parse_width_method(*method)) out.width_method = *parsed;
            else report(node["width_method"], ErrorCode::ManifestParse, "width_method must be 'quadratic' or 'endpoints', got '" + *method + "'");
        }
        out.q_zero_epsilon = scalar<double>(node, "q_zero_epsilon");
        return out;
    }
};

void check_resolved(Reader& reader, const YAML::Node& at, const WindowPlan& plan, const MfdfaConfig& config,
                    const std::string& where) {
    try {
        config.validate_static();
    } catch (const Error& e) {
        reader.report(at, e.code(), where + ": " + e.what());
    }
    if (plan.part_count == 0) reader.report(at, ErrorCode::Config, where + ": part_count must be >= 1");
    if (!(plan.window_length > 0.0)) reader.report(at, ErrorCode::Config, where + ": window_length must be > 0");
    if (!(plan.clip_start >= 0.0)) reader.report(at, ErrorCode::Config, where + ": clip_start must be >= 0");
    if (plan.part_length > 0.0 && plan.window_length > plan.part_length) {
        reader.report(at, ErrorCode::Config, where + ": window_length exceeds part_length");
    }
    if (plan.clip_length > 0.0 && plan.part_length > 0.0 &&
        static_cast<double>(plan.part_count) * plan.part_length > plan.clip_length * (1.0 + 1e-12)) {
        reader.report(at, ErrorCode::Config, where + ": part_count x part_length exceeds clip_length");
    }
}

}  // namespace

void PlanOverrides::merge(const PlanOverrides& higher) {
    if (higher.clip_start) clip_start = higher.clip_start;
    if (higher.clip_length) clip_length = higher.clip_length;
    if (higher.part_count) part_count = higher.part_count;
    if (higher.part_length) part_length = higher.part_length;
    if (higher.window_length) window_length = higher.window_length;
}

void PlanOverrides::apply(WindowPlan& plan) const {
    if (clip_start) plan.clip_start = *clip_start;
    if (clip_length) plan.clip_length = *clip_length;
    if (part_count) plan.part_count = *part_count;
    if (part_length) plan.part_length = *part_length;
    if (window_length) plan.window_length = *window_length;
}

bool AnalysisOverrides::sets_q() const { return q_grid || q_min || q_max || q_step; }

bool AnalysisOverrides::sets_scales() const { return scales || scale_min || scale_max || scale_count; }

void AnalysisOverrides::merge(const AnalysisOverrides& higher) {
    if (higher.sets_q()) {
        q_grid = higher.q_grid;
        q_min = higher.q_min;
        q_max = higher.q_max;
        q_step = higher.q_step;
    }
    if (higher.sets_scales()) {
        scales = higher.scales;
        scale_min = higher.scale_min;
        scale_max = higher.scale_max;
        scale_count = higher.scale_count;
    }
    if (higher.detrend_order) detrend_order = higher.detrend_order;
    if (higher.bidirectional) bidirectional = higher.bidirectional;
    if (higher.fit_range) fit_range = higher.fit_range;
    if (higher.width_method) width_method = higher.width_method;
    if (higher.q_zero_epsilon) q_zero_epsilon = higher.q_zero_epsilon;
}

void AnalysisOverrides::apply(MfdfaConfig& config) const {
    const MfdfaConfig defaults;
    if (q_grid) {
        config.q_grid = *q_grid;
    } else if (sets_q()) {
        config.q_grid = MfdfaConfig::uniform_q_grid(q_min.value_or(-5.0), q_max.value_or(5.0), q_step.value_or(0.25));
    }
    if (scales) {
        config.scale_grid = *scales;
    } else if (sets_scales()) {
        config.scale_grid.clear();
        config.scale_min = scale_min.value_or(defaults.scale_min);
        config.scale_max = scale_max.value_or(defaults.scale_max);
        config.scale_count = scale_count.value_or(defaults.scale_count);
    }
    if (detrend_order) config.detrend_order = *detrend_order;
    if (bidirectional) config.bidirectional = *bidirectional;
    if (fit_range) config.fit_range = *fit_range;
    if (width_method) config.width_method = *width_method;
    if (q_zero_epsilon) config.q_zero_epsilon = *q_zero_epsilon;
}

void Overrides::merge(const Overrides& higher) {
    plan.merge(higher.plan);
    analysis.merge(higher.analysis);
}

ManifestError::ManifestError(std::vector<ManifestIssue> issues)
    : Error(issues.empty() ? ErrorCode::ManifestParse : issues.front().code, issues_text(issues)),
      issues_(std::move(issues)) {}

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir, const Overrides& cli,
                        bool check_files) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ManifestError({ManifestIssue{e.mark.line + 1, ErrorCode::ManifestParse,
                                           "column " + std::to_string(e.mark.column + 1) + ": " + e.msg}});
    }
    Reader reader;
    Manifest manifest;
    if (!root || !root.IsMap()) {
        throw ManifestError({ManifestIssue{1, ErrorCode::ManifestParse, "manifest must be a YAML mapping"}});
    }
    reader.check_keys(root, {"version", "output_dir", "defaults", "entries"}, "manifest");

    if (auto version = reader.scalar<int>(root, "version")) {
        if (*version != kManifestVersion) {
            reader.report(root["version"], ErrorCode::ManifestParse,
                          "unsupported manifest version " + std::to_string(*version));
        }
        manifest.version = *version;
    } else if (!root["version"]) {
        reader.report(root, ErrorCode::ManifestParse, "missing 'version'");
    }
    if (auto out = reader.scalar<std::string>(root, "output_dir")) {
        const std::filesystem::path p(*out);
        manifest.output_dir = p.is_relative() ? base_dir / p : p;
    }

    Overrides base;
    if (const YAML::Node defaults = root["defaults"]) {
        if (reader.is_map(defaults, "defaults")) {
            reader.check_keys(defaults, {"window_plan", "analysis"}, "defaults");
            base.plan = reader.plan(defaults["window_plan"]);
            base.analysis = reader.analysis(defaults["analysis"]);
        }
    }
    base.merge(cli);
    try {
        WindowPlan plan;
        MfdfaConfig config;
        base.plan.apply(plan);
        base.analysis.apply(config);
        check_resolved(reader, root["defaults"] ? root["defaults"] : root, plan, config, "defaults");
    } catch (const Error& e) {
        reader.report(root["defaults"] ? root["defaults"] : root, e.code(), std::string("defaults: ") + e.what());
    }

    const YAML::Node entries = root["entries"];
    if (!entries) {
        reader.report(root, ErrorCode::ManifestParse, "missing 'entries'");
    } else if (!entries.IsSequence()) {
        reader.report(entries, ErrorCode::ManifestParse, "'entries' must be a list");
    } else {
        std::map<std::tuple<std::string, std::string, int>, int> seen;
        for (const YAML::Node& entry : entries) {
            const int line = line_of(entry);
            const std::string where = "entry at line " + std::to_string(line);
            if (!reader.is_map(entry, where)) continue;
            reader.check_keys(entry, {"song_id", "artist", "year", "generation", "audio", "window_plan", "analysis"}, where);
            RenditionRecord record;
            record.source_line = line;
            bool complete = true;
            auto required = [&](const char* key) {
                if (!entry[key]) {
                    reader.report(entry, ErrorCode::ManifestParse, where + ": missing '" + key + "'");
                    complete = false;
                }
            };
            for (const char* key : {"song_id", "artist", "year", "generation", "audio"}) required(key);
            if (auto v = reader.scalar<std::string>(entry, "song_id")) record.song_id = *v;
            if (auto v = reader.scalar<std::string>(entry, "artist")) record.artist = *v;
            if (auto v = reader.scalar<int>(entry, "year")) {
                if (*v < 1900 || *v > 2100) reader.report(entry["year"], ErrorCode::ManifestParse, where + ": year outside 1900-2100");
                record.year = *v;
            } else {
                complete = false;
            }
            if (auto v = reader.scalar<int>(entry, "generation")) {
                if (*v < 1) reader.report(entry["generation"], ErrorCode::ManifestParse, where + ": generation must be >= 1");
                record.generation = *v;
            } else {
                complete = false;
            }
            if (auto v = reader.scalar<std::string>(entry, "audio")) {
                const std::filesystem::path p(*v);
                record.audio = p.is_relative() ? base_dir / p : p;
                if (check_files && !std::filesystem::is_regular_file(record.audio)) {
                    reader.report(entry["audio"], ErrorCode::MissingFile, where + ": audio file not found: " + record.audio.string());
                }
            }

            Overrides layered = base;
            Overrides own;
            own.plan = reader.plan(entry["window_plan"]);
            own.analysis = reader.analysis(entry["analysis"]);
            layered.merge(own);
            try {
                layered.plan.apply(record.plan);
                layered.analysis.apply(record.config);
                check_resolved(reader, entry, record.plan, record.config, where);
            } catch (const Error& e) {
                reader.report(entry, e.code(), where + ": " + e.what());
            }

            if (complete) {
                const auto key = std::make_tuple(record.song_id, record.artist, record.year);
                const auto [it, inserted] = seen.emplace(key, line);
                if (!inserted) {
                    reader.report(entry, ErrorCode::DuplicateEntry,
                                  "duplicate entry (" + record.song_id + ", " + record.artist + ", " +
                                      std::to_string(record.year) + ") at lines " + std::to_string(it->second) +
                                      " and " + std::to_string(line));
                }
            }
            manifest.entries.push_back(std::move(record));
        }
    }
    if (!reader.issues.empty()) throw ManifestError(std::move(reader.issues));
    return manifest;
}

Manifest validate_manifest(const std::filesystem::path& path, const Overrides& cli) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::MissingFile, "cannot read manifest: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    Manifest manifest = parse_manifest(text.str(), path.parent_path(), cli, true);
    manifest.source = path;
    return manifest;
}

}  // namespace mfdfa
