#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace mfdfa {

/// A finite, non-empty real-valued series sampled at a fixed rate.
///
/// Decoded PCM is normalized to [-1, 1]. Synthetic series use a nominal
/// rate of 1 Hz.
class Signal {
public:
    Signal(std::vector<double> samples, double sample_rate);

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double sample_rate() const noexcept { return rate_; }
    double duration() const noexcept { return static_cast<double>(samples_.size()) / rate_; }

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    std::vector<double> samples_;
    double rate_;
};

/// Clip -> part -> window segmentation, all lengths in seconds.
///
/// clip_length = 0 means "to the end of the audio"; part_length = 0 means
/// clip_length / part_count. resolved() fills both in.
struct WindowPlan {
    double clip_start = 0.0;
    double clip_length = 0.0;
    std::size_t part_count = 6;
    double part_length = 0.0;
    double window_length = 6.0;

    std::size_t windows_per_part() const;
    /// Throws Config on violated invariants. Requires a resolved plan.
    void validate() const;
    /// Concrete plan for audio of the given duration. Throws
    /// InsufficientAudio when the audio cannot hold one window per part.
    WindowPlan resolved(double available_seconds) const;

    friend bool operator==(const WindowPlan&, const WindowPlan&) = default;
};

using Part = std::vector<Signal>;

/// RIFF/WAVE integer PCM (8/16/24/32-bit) or 32-bit float, mono or stereo.
/// Stereo is mixed to mono by per-frame channel mean.
Signal decode_wav(const std::filesystem::path& path);
Signal decode_wav_bytes(std::span<const unsigned char> bytes);

/// Writes a mono 32-bit IEEE float WAV.
void write_wav_float(const std::filesystem::path& path, const Signal& signal);
/// Writes a mono 16-bit PCM WAV; samples are clamped to [-1, 32767/32768].
void write_wav_pcm16(const std::filesystem::path& path, const Signal& signal);

/// Sub-signal covering samples floor(start*rate) .. floor((start+length)*rate).
Signal extract_clip(const Signal& signal, double start, double length);

/// Cuts the plan's clip into part_count parts of non-overlapping windows;
/// remainders inside a part are dropped. Auto (0) lengths resolve against the signal.
std::vector<Part> partition_windows(const Signal& signal, const WindowPlan& plan);

}  // namespace mfdfa
