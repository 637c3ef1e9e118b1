#include "mfdfa/signal_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "mfdfa/error.hpp"

namespace mfdfa {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct FormatChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t block_align = 0;
    std::uint16_t bits = 0;
};

// One PCM sample, normalized by 2^(bits-1); 8-bit is unsigned with offset 128.
double decode_sample(const unsigned char* p, const FormatChunk& fmt) {
    switch (fmt.bits) {
    case 8:
        return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
        return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
        std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (v & 0x800000) v -= 0x1000000;
        return v / 8388608.0;
    }
    case 32:
        if (fmt.format == kFormatFloat) {
            return static_cast<double>(std::bit_cast<float>(read_u32(p)));
        }
        return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
    default:
        fail(ErrorCode::UnsupportedCodec, "unsupported bit depth " + std::to_string(fmt.bits));
    }
}

std::size_t seconds_to_samples(double seconds, double rate) {
    // Guards against 6.0 * 22050 landing a hair below an integer.
    return static_cast<std::size_t>(std::floor(seconds * rate + 1e-9));
}

std::string seconds_text(double s) {
    std::ostringstream os;
    os << s << " s";
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

std::string wav_header(std::uint16_t format, std::uint16_t bits, std::uint32_t rate,
                       std::uint32_t data_bytes) {
    std::string out;
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, format);
    put_u16(out, 1);
    put_u32(out, rate);
    put_u32(out, rate * (bits / 8));
    put_u16(out, static_cast<std::uint16_t>(bits / 8));
    put_u16(out, bits);
    out += "data";
    put_u32(out, data_bytes);
    return out;
}

std::uint32_t integral_rate(const Signal& signal) {
    double r = std::round(signal.sample_rate());
    if (r < 1.0 || r > 4294967295.0) fail(ErrorCode::InvalidArgument, "sample rate not representable in WAV");
    return static_cast<std::uint32_t>(r);
}

}  // namespace

Signal::Signal(std::vector<double> samples, double sample_rate)
    : samples_(std::move(samples)), rate_(sample_rate) {
    if (samples_.empty()) fail(ErrorCode::EmptySignal, "signal has no samples");
    if (!(rate_ > 0.0) || !std::isfinite(rate_)) fail(ErrorCode::InvalidArgument, "sample rate must be positive");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i])) {
            fail(ErrorCode::Data, "non-finite sample at index " + std::to_string(i));
        }
    }
}

std::size_t WindowPlan::windows_per_part() const {
    if (!(window_length > 0.0)) return 0;
    return static_cast<std::size_t>(std::floor(part_length / window_length + 1e-9));
}

void WindowPlan::validate() const {
    if (!(clip_start >= 0.0)) fail(ErrorCode::Config, "clip_start must be >= 0");
    if (!(clip_length > 0.0)) fail(ErrorCode::Config, "clip_length must be > 0");
    if (part_count == 0) fail(ErrorCode::Config, "part_count must be >= 1");
    if (!(part_length > 0.0)) fail(ErrorCode::Config, "part_length must be > 0");
    if (!(window_length > 0.0)) fail(ErrorCode::Config, "window_length must be > 0");
    if (static_cast<double>(part_count) * part_length > clip_length * (1.0 + 1e-12)) {
        fail(ErrorCode::Config, "part_count x part_length exceeds clip_length");
    }
    if (window_length > part_length * (1.0 + 1e-12)) {
        fail(ErrorCode::Config, "window_length " + seconds_text(window_length) +
                                    " exceeds part_length " + seconds_text(part_length));
    }
}

WindowPlan WindowPlan::resolved(double available_seconds) const {
    WindowPlan plan = *this;
    if (plan.part_count == 0) fail(ErrorCode::Config, "part_count must be >= 1");
    if (!(plan.window_length > 0.0)) fail(ErrorCode::Config, "window_length must be > 0");
    double minimum = plan.clip_start;
    if (plan.clip_length > 0.0) {
        minimum += plan.clip_length;
    } else if (plan.part_length > 0.0) {
        minimum += static_cast<double>(plan.part_count) * plan.part_length;
    } else {
        minimum += static_cast<double>(plan.part_count) * plan.window_length;
    }
    if (available_seconds + 1e-9 < minimum) {
        fail(ErrorCode::InsufficientAudio,
             "insufficient audio: plan requires " + seconds_text(minimum) + ", available " +
                 seconds_text(available_seconds));
    }
    if (plan.clip_length <= 0.0) plan.clip_length = available_seconds - plan.clip_start;
    if (plan.part_length <= 0.0) plan.part_length = plan.clip_length / static_cast<double>(plan.part_count);
    plan.validate();
    return plan;
}

Signal decode_wav_bytes(std::span<const unsigned char> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        fail(ErrorCode::Format, "not a RIFF/WAVE file");
    }
    std::optional<FormatChunk> fmt;
    std::span<const unsigned char> data;
    bool have_data = false;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        std::uint32_t size = read_u32(chunk + 4);
        std::size_t body = pos + 8;
        std::size_t available = bytes.size() - body;
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16 || size > available) fail(ErrorCode::Format, "truncated fmt chunk");
            const unsigned char* p = bytes.data() + body;
            FormatChunk f;
            f.format = read_u16(p);
            f.channels = read_u16(p + 2);
            f.sample_rate = read_u32(p + 4);
            f.block_align = read_u16(p + 12);
            f.bits = read_u16(p + 14);
            if (f.format == kFormatExtensible) {
                if (size < 40) fail(ErrorCode::Format, "truncated WAVE_FORMAT_EXTENSIBLE fmt chunk");
                f.format = read_u16(p + 24);
            }
            fmt = f;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            // Streams written with an unknown length sometimes leave the size oversized.
            data = bytes.subspan(body, std::min<std::size_t>(size, available));
            have_data = true;
        }
        std::size_t advance = static_cast<std::size_t>(size) + (size & 1u);
        if (advance > available) break;
        pos = body + advance;
    }
    if (!fmt) fail(ErrorCode::Format, "missing fmt chunk");
    if (!have_data) fail(ErrorCode::Format, "missing data chunk");
    if (fmt->format != kFormatPcm && fmt->format != kFormatFloat) {
        fail(ErrorCode::UnsupportedCodec, "unsupported WAV codec tag " + std::to_string(fmt->format));
    }
    if (fmt->format == kFormatFloat && fmt->bits != 32) {
        fail(ErrorCode::UnsupportedCodec, "only 32-bit float PCM is supported");
    }
    if (fmt->format == kFormatPcm && fmt->bits != 8 && fmt->bits != 16 && fmt->bits != 24 && fmt->bits != 32) {
        fail(ErrorCode::UnsupportedCodec, "unsupported PCM bit depth " + std::to_string(fmt->bits));
    }
    if (fmt->channels != 1 && fmt->channels != 2) {
        fail(ErrorCode::UnsupportedCodec, "unsupported channel count " + std::to_string(fmt->channels));
    }
    if (fmt->sample_rate == 0) fail(ErrorCode::Format, "zero sample rate");
    const std::size_t sample_bytes = fmt->bits / 8u;
    const std::size_t frame_bytes = sample_bytes * fmt->channels;
    if (fmt->block_align != 0 && fmt->block_align != frame_bytes) {
        fail(ErrorCode::Format, "block_align inconsistent with channels and bit depth");
    }
    const std::size_t frames = data.size() / frame_bytes;
    if (frames == 0) fail(ErrorCode::EmptySignal, "WAV data chunk holds zero frames");

    std::vector<double> samples(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const unsigned char* frame = data.data() + i * frame_bytes;
        if (fmt->channels == 1) {
            samples[i] = decode_sample(frame, *fmt);
        } else {
            samples[i] = 0.5 * (decode_sample(frame, *fmt) + decode_sample(frame + sample_bytes, *fmt));
        }
    }
    return Signal(std::move(samples), static_cast<double>(fmt->sample_rate));
}

Signal decode_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::MissingFile, "cannot open audio file: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_wav_bytes(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_wav_float(const std::filesystem::path& path, const Signal& signal) {
    const auto samples = signal.samples();
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
    std::string out = wav_header(kFormatFloat, 32, integral_rate(signal), data_bytes);
    out.reserve(out.size() + data_bytes);
    for (double v : samples) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    write_file(path, out);
}

void write_wav_pcm16(const std::filesystem::path& path, const Signal& signal) {
    const auto samples = signal.samples();
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    std::string out = wav_header(kFormatPcm, 16, integral_rate(signal), data_bytes);
    out.reserve(out.size() + data_bytes);
    for (double v : samples) {
        double scaled = std::round(v * 32768.0);
        scaled = std::clamp(scaled, -32768.0, 32767.0);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }
    write_file(path, out);
}

Signal extract_clip(const Signal& signal, double start, double length) {
    if (!(start >= 0.0) || !(length >= 0.0)) {
        fail(ErrorCode::Bounds, "clip start and length must be non-negative");
    }
    const double rate = signal.sample_rate();
    const std::size_t first = seconds_to_samples(start, rate);
    const std::size_t last = seconds_to_samples(start + length, rate);
    if (last > signal.size() || first >= last) {
        fail(ErrorCode::Bounds, "clip [" + seconds_text(start) + ", +" + seconds_text(length) +
                                    "] outside signal of " + seconds_text(signal.duration()));
    }
    auto s = signal.samples();
    return Signal(std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(first),
                                      s.begin() + static_cast<std::ptrdiff_t>(last)),
                  rate);
}

std::vector<Part> partition_windows(const Signal& signal, const WindowPlan& requested) {
    const WindowPlan plan = requested.resolved(signal.duration());
    const double required = plan.clip_start + static_cast<double>(plan.part_count) * plan.part_length;
    const double rate = signal.sample_rate();
    const std::size_t window_samples = seconds_to_samples(plan.window_length, rate);
    const std::size_t windows = plan.windows_per_part();
    const std::size_t needed =
        seconds_to_samples(plan.clip_start + static_cast<double>(plan.part_count - 1) * plan.part_length, rate) +
        windows * window_samples;
    if (signal.duration() + 1e-9 < required || signal.size() < needed) {
        fail(ErrorCode::InsufficientAudio, "insufficient audio: plan requires " + seconds_text(required) +
                                               ", available " + seconds_text(signal.duration()));
    }
    if (window_samples == 0) fail(ErrorCode::Config, "window shorter than one sample");

    auto s = signal.samples();
    std::vector<Part> parts;
    parts.reserve(plan.part_count);
    for (std::size_t p = 0; p < plan.part_count; ++p) {
        const std::size_t part_start =
            seconds_to_samples(plan.clip_start + static_cast<double>(p) * plan.part_length, rate);
        Part part;
        part.reserve(windows);
        for (std::size_t w = 0; w < windows; ++w) {
            auto begin = s.begin() + static_cast<std::ptrdiff_t>(part_start + w * window_samples);
            part.emplace_back(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(window_samples)), rate);
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

}  // namespace mfdfa
