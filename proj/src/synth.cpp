#include "mfdfa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mfdfa/error.hpp"

namespace mfdfa::synth {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void check_hurst(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) fail(ErrorCode::InvalidArgument, "Hurst exponent must lie in (0, 1)");
}

}  // namespace

double PortableRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t PortableRng::below(std::uint64_t bound) {
    if (bound == 0) fail(ErrorCode::InvalidArgument, "empty range");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = engine_();
        if (r >= threshold) return r % bound;
    }
}

void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
    const std::size_t n = re.size();
    if (im.size() != n || !is_power_of_two(n)) {
        fail(ErrorCode::InvalidArgument, "FFT size must be a power of two");
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    std::vector<double> cos_table(n / 2);
    std::vector<double> sin_table(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        cos_table[k] = std::cos(angle);
        sin_table[k] = std::sin(angle);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const double wr = cos_table[k * stride];
                const double wi = sin_table[k * stride];
                const std::size_t a = start + k;
                const std::size_t b = a + half;
                const double tr = re[b] * wr - im[b] * wi;
                const double ti = re[b] * wi + im[b] * wr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
            }
        }
    }
}

Signal gen_white_noise(std::size_t n, std::uint64_t seed) {
    if (n < 2) fail(ErrorCode::InvalidArgument, "white noise needs n >= 2");
    PortableRng rng(seed);
    std::vector<double> x(n);
    for (double& v : x) v = rng.gaussian();
    return Signal(std::move(x), 1.0);
}

double fgn_autocovariance(double hurst, std::size_t lag) {
    const double k = static_cast<double>(lag);
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(std::abs(k - 1.0), two_h));
}

Signal hosking_fgn(const FgnSpec& spec) {
    check_hurst(spec.hurst);
    const std::size_t n = spec.length;
    if (n < 2) fail(ErrorCode::InvalidArgument, "fGn length must be >= 2");
    PortableRng rng(spec.seed);
    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < n; ++k) gamma[k] = fgn_autocovariance(spec.hurst, k);

    std::vector<double> x(n);
    std::vector<double> phi;
    std::vector<double> next;
    double variance = gamma[0];
    x[0] = std::sqrt(variance) * rng.gaussian();
    for (std::size_t t = 1; t < n; ++t) {
        double num = gamma[t];
        for (std::size_t j = 1; j < t; ++j) num -= phi[j - 1] * gamma[t - j];
        const double reflection = num / variance;
        next.assign(t, 0.0);
        for (std::size_t j = 1; j < t; ++j) next[j - 1] = phi[j - 1] - reflection * phi[t - j - 1];
        next[t - 1] = reflection;
        phi.swap(next);
        variance *= 1.0 - reflection * reflection;
        double mean = 0.0;
        for (std::size_t j = 1; j <= t; ++j) mean += phi[j - 1] * x[t - j];
        x[t] = mean + std::sqrt(variance) * rng.gaussian();
    }
    return Signal(std::move(x), 1.0);
}

Signal gen_fgn(const FgnSpec& spec) {
    check_hurst(spec.hurst);
    const std::size_t n = spec.length;
    if (n < 2 || !is_power_of_two(n)) fail(ErrorCode::InvalidArgument, "fGn length must be a power of two >= 2");

    const std::size_t m = 2 * n;
    std::vector<double> re(m, 0.0);
    std::vector<double> im(m, 0.0);
    for (std::size_t j = 0; j <= n; ++j) re[j] = fgn_autocovariance(spec.hurst, j);
    for (std::size_t j = n + 1; j < m; ++j) re[j] = re[m - j];
    fft_radix2(re, im);
    std::vector<double> eigen(re);
    const double largest = *std::max_element(eigen.begin(), eigen.end());
    for (double& e : eigen) {
        if (e < -1e-10 * largest) return hosking_fgn(spec);
        e = std::max(e, 0.0);
    }

    PortableRng rng(spec.seed);
    const double md = static_cast<double>(m);
    re.assign(m, 0.0);
    im.assign(m, 0.0);
    re[0] = std::sqrt(eigen[0] / md) * rng.gaussian();
    re[n] = std::sqrt(eigen[n] / md) * rng.gaussian();
    for (std::size_t k = 1; k < n; ++k) {
        const double scale = std::sqrt(eigen[k] / (2.0 * md));
        const double a = rng.gaussian();
        const double b = rng.gaussian();
        re[k] = scale * a;
        im[k] = scale * b;
        re[m - k] = scale * a;
        im[m - k] = -scale * b;
    }
    fft_radix2(re, im);
    re.resize(n);
    return Signal(std::move(re), 1.0);
}

Signal gen_binomial_cascade(const CascadeSpec& spec) {
    if (spec.levels < 1 || spec.levels > 24) fail(ErrorCode::InvalidArgument, "cascade levels must be in [1, 24]");
    if (!(spec.weight > 0.0 && spec.weight < 1.0)) fail(ErrorCode::InvalidArgument, "cascade weight must be in (0, 1)");
    std::vector<double> cells{1.0};
    for (int level = 0; level < spec.levels; ++level) {
        std::vector<double> next(cells.size() * 2);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            next[2 * i] = cells[i] * spec.weight;
            next[2 * i + 1] = cells[i] * (1.0 - spec.weight);
        }
        cells.swap(next);
    }
    return Signal(std::move(cells), 1.0);
}

double analytic_cascade_h(double q, double weight) {
    if (!(weight > 0.5 && weight < 1.0)) fail(ErrorCode::InvalidArgument, "cascade weight must be in (0.5, 1)");
    const double other = 1.0 - weight;
    if (std::abs(q) <= 1e-9) return -(std::log(weight) + std::log(other)) / (2.0 * std::numbers::ln2);
    return 1.0 / q - std::log(std::pow(weight, q) + std::pow(other, q)) / (q * std::numbers::ln2);
}

double analytic_cascade_alpha(double q, double weight) {
    if (!(weight > 0.5 && weight < 1.0)) fail(ErrorCode::InvalidArgument, "cascade weight must be in (0.5, 1)");
    const double other = 1.0 - weight;
    const double wa = std::pow(weight, q);
    const double wb = std::pow(other, q);
    return -(wa * std::log(weight) + wb * std::log(other)) / ((wa + wb) * std::numbers::ln2);
}

Signal shuffle(const Signal& signal, std::uint64_t seed) {
    PortableRng rng(seed);
    std::vector<double> x(signal.samples().begin(), signal.samples().end());
    for (std::size_t i = x.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(x[i - 1], x[j]);
    }
    return Signal(std::move(x), signal.sample_rate());
}

Signal gen_cascade_modulated_noise(std::size_t n, double weight, double sample_rate, std::uint64_t seed) {
    if (n < 2) fail(ErrorCode::InvalidArgument, "modulated noise needs n >= 2");
    std::size_t cells = next_power_of_two(n);
    int levels = 0;
    while ((std::size_t{1} << levels) < cells) ++levels;
    const Signal envelope = gen_binomial_cascade(CascadeSpec{levels, weight});
    PortableRng rng(seed);
    const double mass_scale = static_cast<double>(cells);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.gaussian() * std::sqrt(envelope.samples()[i] * mass_scale);
    return Signal(std::move(x), sample_rate);
}

std::filesystem::path write_synthetic_corpus(const std::filesystem::path& dir, const CorpusOptions& options) {
    if (options.generations == 0) fail(ErrorCode::InvalidArgument, "corpus needs at least one generation");
    if (!(options.seconds > 0.0) || !(options.sample_rate > 0.0)) {
        fail(ErrorCode::InvalidArgument, "corpus duration and sample rate must be positive");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create directory " + dir.string() + ": " + ec.message());

    const auto samples = static_cast<std::size_t>(std::floor(options.seconds * options.sample_rate + 1e-9));
    std::ostringstream manifest;
    manifest << "# Synthetic oracle corpus\n"
             << "version: 1\n"
             << "defaults:\n"
             << "  window_plan:\n"
             << "    part_count: " << options.part_count << "\n"
             << "    window_length: " << options.window_length << "\n"
             << "entries:\n";
    for (std::size_t g = 1; g <= options.generations; ++g) {
        const std::uint64_t seed = options.seed * 1000003u + g;
        std::vector<double> x;
        std::string artist;
        if (g % 2 == 1) {
            const double hurst = 0.5 + 0.1 * static_cast<double>((g / 2) % 4);
            const Signal fgn = gen_fgn(FgnSpec{hurst, next_power_of_two(samples), seed});
            x.assign(fgn.samples().begin(), fgn.samples().begin() + static_cast<std::ptrdiff_t>(samples));
            std::ostringstream name;
            name << "fgn-h" << hurst;
            artist = name.str();
        } else {
            const double weight = 0.6 + 0.02 * static_cast<double>((g / 2) % 4);
            const Signal noise = gen_cascade_modulated_noise(samples, weight, options.sample_rate, seed);
            x.assign(noise.samples().begin(), noise.samples().end());
            std::ostringstream name;
            name << "cascade-noise-a" << weight;
            artist = name.str();
        }
        double peak = 0.0;
        for (double v : x) peak = std::max(peak, std::abs(v));
        for (double& v : x) v *= 0.5 / peak;
        const std::string file = "generation_" + std::to_string(g) + ".wav";
        write_wav_float(dir / file, Signal(std::move(x), options.sample_rate));
        manifest << "  - song_id: synthetic\n"
                 << "    artist: " << artist << "\n"
                 << "    year: " << 1900 + 20 * g << "\n"
                 << "    generation: " << g << "\n"
                 << "    audio: " << file << "\n";
    }
    const auto path = dir / "manifest.yaml";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << manifest.str();
    return path;
}

}  // namespace mfdfa::synth
