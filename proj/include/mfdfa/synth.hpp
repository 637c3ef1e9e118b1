#pragma once

// Seeded synthetic series with known scaling properties.
//
// Random bits come from std::mt19937_64 (bit-exact by the C++ standard:
// the 10000th output of a default-seeded engine is 9981545732273789042).
// Uniforms take the top 53 bits; Gaussians use the Box-Muller transform;
// bounded integers use rejection sampling. None of the implementation-
// defined <random> distributions are used, so sequences are reproducible
// across standard libraries.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "mfdfa/signal_io.hpp"

namespace mfdfa::synth {

class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    /// Standard normal.
    double gaussian();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct FgnSpec {
    double hurst = 0.5;
    std::size_t length = 1u << 16;
    std::uint64_t seed = 0;
};

struct CascadeSpec {
    int levels = 16;
    double weight = 0.75;
};

Signal gen_white_noise(std::size_t n, std::uint64_t seed);

/// Autocovariance of unit-variance fGn at integer lag k.
double fgn_autocovariance(double hurst, std::size_t lag);

/// Davies-Harte circulant embedding; falls back to hosking_fgn when an
/// embedding eigenvalue is negative.
Signal gen_fgn(const FgnSpec& spec);
/// Sequential conditional (Durbin-Levinson) generator, O(n^2).
Signal hosking_fgn(const FgnSpec& spec);

/// Deterministic binomial measure on 2^levels cells; left halves get weight.
Signal gen_binomial_cascade(const CascadeSpec& spec);

/// Closed-form h(q) of the binomial cascade.
double analytic_cascade_h(double q, double weight);
/// Closed-form singularity strength alpha(q) of the binomial cascade.
double analytic_cascade_alpha(double q, double weight);

/// Fisher-Yates permutation driven by PortableRng.
Signal shuffle(const Signal& signal, std::uint64_t seed);

/// Gaussian noise whose local amplitude follows a binomial cascade;
/// a stand-in for intermittent, music-like audio.
Signal gen_cascade_modulated_noise(std::size_t n, double weight, double sample_rate,
                                   std::uint64_t seed);

/// In-place radix-2 complex FFT (forward, unnormalized). Size must be a
/// power of two. Fixed evaluation order.
void fft_radix2(std::vector<double>& re, std::vector<double>& im);

struct CorpusOptions {
    std::size_t generations = 5;
    double seconds = 180.0;
    double sample_rate = 22050.0;
    std::uint64_t seed = 1;
    std::size_t part_count = 6;
    double window_length = 6.0;
};

/// Writes one float WAV per generation plus manifest.yaml into dir and
/// returns the manifest path. Generation g alternates fGn and
/// cascade-modulated noise.
std::filesystem::path write_synthetic_corpus(const std::filesystem::path& dir,
                                             const CorpusOptions& options);

}  // namespace mfdfa::synth
