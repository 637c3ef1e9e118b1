#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfdfa/runner.hpp"
#include "mfdfa/synth.hpp"
#include "test_util.hpp"

using namespace mfdfa;
namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct Corpus {
    fs::path dir;
    fs::path manifest;

    explicit Corpus(const std::string& name, std::size_t parts = 4) {
        dir = fs::temp_directory_path() / name;
        fs::remove_all(dir);
        synth::CorpusOptions o;
        o.generations = 5;
        o.seconds = 24.0;
        o.part_count = parts;
        o.window_length = 6.0;
        manifest = synth::write_synthetic_corpus(dir, o);
    }
    ~Corpus() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("run writes the report set") {
    Corpus c("mfdfa_test_runner");
    const Manifest m = validate_manifest(c.manifest);
    RunOptions opt;
    opt.out_dir = c.dir / "out";
    const RunSummary s = run(m, opt);
    CHECK(s.renditions == 5);
    CHECK(s.errored == 0);
    CHECK(s.exit_status() == 0);

    const std::string widths = slurp(opt.out_dir / "widths.csv");
    CHECK(line_count(widths) == 21);
    CHECK(widths.rfind("song_id,artist,year,generation,part,mean_width,mean_alpha0,mean_h2,window_count,flagged_count\n", 0) == 0);
    CHECK(widths.find('\r') == std::string::npos);

    const std::string windows = slurp(opt.out_dir / "windows.csv");
    CHECK(line_count(windows) == 21);  // one 6 s window per 6 s part

    std::stringstream wl(windows);
    std::string header, row;
    std::getline(wl, header);
    const auto cols = split(header);
    const auto width_col = std::find(cols.begin(), cols.end(), "width") - cols.begin();
    std::getline(wl, row);
    const auto fields = split(row);
    REQUIRE(fields.size() == cols.size());
    const double w = std::strtod(fields[static_cast<std::size_t>(width_col)].c_str(), nullptr);
    CHECK(w == s.reports[0].parts[0].windows[0].width);

    const std::string gens = slurp(opt.out_dir / "generations.csv");
    CHECK(gens.rfind("song_id,generation,renditions,part,mean_width\n", 0) == 0);
    CHECK(line_count(gens) == 1 + 5 * 5);

    CHECK(line_count(slurp(opt.out_dir / "plot_synthetic.csv")) == 21);
    CHECK(line_count(slurp(opt.out_dir / "plot_all.csv")) == 21);

    std::size_t spectra = 0;
    for (const auto& entry : fs::directory_iterator(opt.out_dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("spectrum_", 0) != 0) continue;
        ++spectra;
        const std::string text = slurp(entry.path());
        CHECK(text.rfind("q,h,tau,alpha,f_alpha\n", 0) == 0);
        CHECK(line_count(text) == 42);
    }
    CHECK(spectra == 5);

    SECTION("rerun and worker count give identical bytes") {
        RunOptions again = opt;
        again.out_dir = c.dir / "out2";
        again.jobs = 4;
        run(m, again);
        for (const char* f : {"widths.csv", "windows.csv", "generations.csv", "plot_all.csv"})
            CHECK(slurp(opt.out_dir / f) == slurp(again.out_dir / f));
    }
}

TEST_CASE("dry run writes nothing") {
    Corpus c("mfdfa_test_runner_dry");
    RunOptions opt;
    opt.out_dir = c.dir / "out";
    opt.dry_run = true;
    const RunSummary s = run(validate_manifest(c.manifest), opt);
    CHECK(s.exit_status() == 0);
    CHECK(s.files.empty());
    CHECK_FALSE(fs::exists(opt.out_dir));
}

TEST_CASE("errored renditions set the exit status") {
    Corpus c("mfdfa_test_runner_err");
    write_wav_float(c.dir / "silence.wav", Signal(std::vector<double>(22050 * 24, 0.0), 22050.0));
    write_wav_float(c.dir / "short.wav", Signal(std::vector<double>(22050 * 5, 0.1), 22050.0));
    std::ofstream(c.dir / "bad.yaml") << R"(version: 1
defaults:
  window_plan:
    part_count: 4
entries:
  - song_id: quiet
    artist: nobody
    year: 2000
    generation: 1
    audio: silence.wav
  - song_id: brief
    artist: someone
    year: 2001
    generation: 1
    audio: short.wav
  - song_id: ok
    artist: fgn
    year: 2002
    generation: 1
    audio: generation_1.wav
)";
    RunOptions opt;
    opt.out_dir = c.dir / "out";
    const RunSummary s = run(validate_manifest(c.dir / "bad.yaml"), opt);
    CHECK(s.renditions == 3);
    CHECK(s.errored == 2);
    CHECK(s.exit_status() != 0);
    std::string all;
    for (const auto& d : s.diagnostics) all += d + "\n";
    CHECK_THAT(all, ContainsSubstring("quiet / nobody (2000)"));
    CHECK_THAT(all, ContainsSubstring("degenerate-segment"));
    CHECK_THAT(all, ContainsSubstring("brief / someone (2001)"));
    CHECK_THAT(all, ContainsSubstring("insufficient-audio"));
    CHECK(fs::exists(opt.out_dir / "widths.csv"));
}

TEST_CASE("output directory precedence and I/O failures") {
    Corpus c("mfdfa_test_runner_io");
    Manifest m = validate_manifest(c.manifest);
    std::ofstream(c.dir / "blocker") << "not a directory";
    RunOptions opt;
    opt.out_dir = c.dir / "blocker" / "out";
    try {
        run(m, opt);
        FAIL("expected an I/O error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
        CHECK_THAT(e.what(), ContainsSubstring("blocker"));
    }

    m.output_dir = c.dir / "from_manifest";
    run(m, RunOptions{});
    CHECK(fs::exists(c.dir / "from_manifest" / "widths.csv"));

    m.output_dir.clear();
    ::setenv("MFDFA_OUT_DIR", (c.dir / "from_env").c_str(), 1);
    run(m, RunOptions{});
    ::unsetenv("MFDFA_OUT_DIR");
    CHECK(fs::exists(c.dir / "from_env" / "widths.csv"));
}

TEST_CASE("csv helpers") {
    CHECK(sanitize_id("Tagore: Song #1 / A.B.") == "Tagore__Song__1___A_B_");
    std::stringstream in("song_id,artist,year,generation,part,mean_width,mean_alpha0,mean_h2,window_count,flagged_count\n"
                         "s,\"Doe, Jane\",1990,2,1,NA,0.5000,0.5000,5,5\n");
    const auto rows = read_widths_csv(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].artist == "Doe, Jane");
    CHECK_FALSE(rows[0].mean_width);
    CHECK(rows[0].flagged_count == 5);
}
