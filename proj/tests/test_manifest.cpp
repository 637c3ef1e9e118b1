#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "mfdfa/runner.hpp"
#include "test_util.hpp"

using namespace mfdfa;
using Catch::Matchers::ContainsSubstring;

namespace {

ManifestError manifest_error(const std::string& text, bool check_files = false) {
    try {
        parse_manifest(text, "/data", {}, check_files);
    } catch (const ManifestError& e) {
        return e;
    }
    FAIL("expected a manifest error");
    throw;
}

}  // namespace

TEST_CASE("minimal manifest applies built-in defaults") {
    const auto m = parse_manifest(R"(version: 1
entries:
  - song_id: s1
    artist: A
    year: 1980
    generation: 2
    audio: a.wav
)",
                                  "/data", {}, false);
    REQUIRE(m.entries.size() == 1);
    const auto& e = m.entries[0];
    CHECK(e.song_id == "s1");
    CHECK(e.artist == "A");
    CHECK(e.year == 1980);
    CHECK(e.generation == 2);
    CHECK(e.audio == std::filesystem::path("/data/a.wav"));
    CHECK(e.plan == WindowPlan{});
    CHECK(e.config == MfdfaConfig{});
    CHECK(e.source_line == 3);
    CHECK(m.output_dir.empty());
}

TEST_CASE("layering: defaults < cli < entry") {
    const std::string text = R"(version: 1
output_dir: results
defaults:
  window_plan:
    part_count: 4
    window_length: 5
  analysis:
    detrend_order: 2
    scale_min: 20
entries:
  - song_id: s1
    artist: A
    year: 1980
    generation: 1
    audio: /abs/a.wav
    analysis:
      q_min: -3
      q_max: 3
  - song_id: s1
    artist: B
    year: 1990
    generation: 2
    audio: b.wav
    window_plan:
      part_count: 6
)";
    SECTION("entry q override only touches that entry") {
        const auto m = parse_manifest(text, "/data", {}, false);
        REQUIRE(m.entries.size() == 2);
        CHECK(m.output_dir == std::filesystem::path("/data/results"));
        CHECK(m.entries[0].audio == std::filesystem::path("/abs/a.wav"));
        const auto& a = m.entries[0].config;
        const auto& b = m.entries[1].config;
        CHECK(a.q_grid == MfdfaConfig::uniform_q_grid(-3, 3, 0.25));
        CHECK(b.q_grid == MfdfaConfig{}.q_grid);
        CHECK(a.detrend_order == 2);
        CHECK(b.detrend_order == 2);
        CHECK(a.scale_min == 20);
        CHECK(m.entries[0].plan.part_count == 4);
        CHECK(m.entries[0].plan.window_length == 5.0);
        CHECK(m.entries[1].plan.part_count == 6);
        CHECK(m.entries[1].plan.window_length == 5.0);
    }
    SECTION("cli beats defaults, entries beat cli") {
        Overrides cli;
        cli.plan.part_count = 3;
        cli.analysis.detrend_order = 3;
        cli.analysis.width_method = WidthMethod::SpectrumEndpoints;
        const auto m = parse_manifest(text, "/data", cli, false);
        CHECK(m.entries[0].plan.part_count == 3);
        CHECK(m.entries[1].plan.part_count == 6);
        CHECK(m.entries[0].config.detrend_order == 3);
        CHECK(m.entries[1].config.width_method == WidthMethod::SpectrumEndpoints);
    }
    SECTION("a scale group set higher up replaces the whole group") {
        Overrides cli;
        cli.analysis.scale_count = 10;
        const auto m = parse_manifest(text, "/data", cli, false);
        CHECK(m.entries[0].config.scale_count == 10);
        CHECK(m.entries[0].config.scale_min == MfdfaConfig{}.scale_min);
    }
}

TEST_CASE("override merge semantics") {
    AnalysisOverrides low;
    low.q_grid = std::vector<double>{-2, -1, 0, 1, 2};
    low.detrend_order = 2;
    AnalysisOverrides high;
    high.q_min = -4;
    low.merge(high);
    CHECK_FALSE(low.q_grid);
    CHECK(low.q_min == -4.0);
    CHECK(low.detrend_order == 2);
    MfdfaConfig c;
    low.apply(c);
    CHECK(c.q_grid == MfdfaConfig::uniform_q_grid(-4, 5, 0.25));
    CHECK(c.detrend_order == 2);
}

TEST_CASE("duplicate entries name both lines") {
    const auto e = manifest_error(R"(version: 1
entries:
  - song_id: s1
    artist: A
    year: 1980
    generation: 1
    audio: a.wav
  - song_id: s1
    artist: A
    year: 1980
    generation: 2
    audio: b.wav
)");
    CHECK(e.code() == ErrorCode::DuplicateEntry);
    CHECK_THAT(e.what(), ContainsSubstring("lines 3 and 8"));
}

TEST_CASE("every problem is reported") {
    const auto e = manifest_error(R"(version: 1
entries:
  - song_id: s1
    artist: A
    year: 1700
    generation: 1
    audio: a.wav
  - song_id: s2
    artist: B
    year: 1980
    generation: 0
    audio: b.wav
    colour: blue
  - artist: C
    year: 1990
    generation: 1
    audio: c.wav
)");
    REQUIRE(e.issues().size() >= 4);
    CHECK_THAT(e.what(), ContainsSubstring("line 5"));
    CHECK_THAT(e.what(), ContainsSubstring("line 11"));
    CHECK_THAT(e.what(), ContainsSubstring("colour"));
    CHECK_THAT(e.what(), ContainsSubstring("song_id"));
}

TEST_CASE("syntax errors carry the position") {
    const auto e = manifest_error("version: 1\nentries:\n  - song_id: [unclosed\n");
    CHECK(e.code() == ErrorCode::ManifestParse);
    REQUIRE_FALSE(e.issues().empty());
    CHECK(e.issues()[0].line >= 3);
}

TEST_CASE("version header") {
    CHECK(manifest_error("entries: []\n").code() == ErrorCode::ManifestParse);
    const auto e = manifest_error("version: 2\nentries: []\n");
    CHECK(e.issues()[0].line == 1);
    CHECK_THAT(e.what(), ContainsSubstring("version 2"));
}

TEST_CASE("invalid analysis settings are caught at validation") {
    const auto e = manifest_error(R"(version: 1
defaults:
  analysis:
    q_min: 1
    q_max: 5
entries: []
)");
    CHECK(e.code() == ErrorCode::Config);
    const auto w = manifest_error(R"(version: 1
defaults:
  analysis:
    width_method: widest
entries: []
)");
    CHECK_THAT(w.what(), ContainsSubstring("widest"));
}

TEST_CASE("missing audio files") {
    const auto dir = std::filesystem::temp_directory_path() / "mfdfa_test_manifest";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "present.wav") << "x";
    std::ofstream(dir / "m.yaml") << R"(version: 1
entries:
  - song_id: s1
    artist: A
    year: 1980
    generation: 1
    audio: present.wav
  - song_id: s1
    artist: B
    year: 1981
    generation: 1
    audio: absent.wav
)";
    try {
        validate_manifest(dir / "m.yaml");
        FAIL("expected missing-file");
    } catch (const ManifestError& e) {
        CHECK(e.code() == ErrorCode::MissingFile);
        CHECK(e.issues().size() == 1);
        CHECK_THAT(e.what(), ContainsSubstring("absent.wav"));
        CHECK(e.issues()[0].line == 12);
    }
    CHECK(code_of([&] { validate_manifest(dir / "nope.yaml"); }) != ErrorCode::Ok);
    std::filesystem::remove_all(dir);
}
