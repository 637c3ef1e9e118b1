#pragma once

// Multifractal detrended fluctuation analysis.
//
// Pipeline: profile -> per-segment detrended variance F^2(s, v) ->
// q-order fluctuation function F_q(s) -> generalized Hurst exponents h(q)
// from log-log regression -> tau(q), Legendre spectrum (alpha, f(alpha)) ->
// multifractal width W.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfdfa/signal_io.hpp"

namespace mfdfa {

enum class Direction { Forward, Backward };

enum class WidthMethod { QuadraticFit, SpectrumEndpoints };

const char* width_method_name(WidthMethod method) noexcept;
std::optional<WidthMethod> parse_width_method(std::string_view text) noexcept;

/// Inclusive index range into the scale grid.
struct FitRange {
    std::size_t first = 0;
    std::size_t last = 0;

    friend bool operator==(const FitRange&, const FitRange&) = default;
};

struct MfdfaConfig {
    std::vector<double> q_grid = uniform_q_grid(-5.0, 5.0, 0.25);
    /// Explicit scales in samples. Empty means "derive from scale_min,
    /// scale_max, scale_count for the signal at hand" (see resolved()).
    std::vector<std::size_t> scale_grid;
    std::size_t scale_min = 16;
    /// 0 means floor(N / 4).
    std::size_t scale_max = 0;
    std::size_t scale_count = 20;
    int detrend_order = 1;
    bool bidirectional = true;
    std::optional<FitRange> fit_range;
    WidthMethod width_method = WidthMethod::QuadraticFit;
    double q_zero_epsilon = 1e-9;

    /// q_min, q_min + step, ..., q_max; values within 1e-9 of an integer
    /// are snapped to it so that 0 and 2 are hit exactly.
    static std::vector<double> uniform_q_grid(double q_min, double q_max, double q_step);

    /// Copy with a concrete scale grid and fit range for a series of
    /// length n, validated against n. Throws Config.
    MfdfaConfig resolved(std::size_t n) const;

    /// Checks everything that does not depend on the series length.
    void validate_static() const;
    /// Full validation for a series of length n; needs a concrete scale grid.
    void validate(std::size_t n) const;

    FitRange effective_fit_range() const;

    friend bool operator==(const MfdfaConfig&, const MfdfaConfig&) = default;
};

/// Roughly log-spaced distinct integers in [min, max].
std::vector<std::size_t> log_spaced_scales(std::size_t min, std::size_t max, std::size_t count);

struct Profile {
    std::vector<double> values;
};

struct FluctuationSurface {
    std::vector<double> q_grid;
    std::vector<std::size_t> scale_grid;
    /// values[qi][si] = F_q(s)
    std::vector<std::vector<double>> values;
    /// Segments averaged per scale (2 floor(N/s) when bidirectional).
    std::vector<std::size_t> segment_counts;
};

struct HurstCurve {
    std::vector<double> q_grid;
    std::vector<double> h;
    std::vector<double> intercepts;
    std::vector<double> r_squared;

    /// h and r^2 at the grid point nearest to q.
    std::size_t index_of(double q) const;
};

struct SingularitySpectrum {
    std::vector<double> q_grid;
    std::vector<double> tau;
    std::vector<double> alpha;
    std::vector<double> f_alpha;
    /// alpha(q) should be non-increasing; finite-size noise can break that.
    bool alpha_monotone = true;
};

struct QuadraticCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
};

struct WidthResult {
    double width = 0.0;
    double alpha0 = 0.0;
    double asymmetry = 0.0;
    std::optional<QuadraticCoefficients> quadratic;
    WidthMethod method = WidthMethod::QuadraticFit;
};

struct MfdfaResult {
    MfdfaConfig config;
    Profile profile;
    FluctuationSurface surface;
    HurstCurve hurst;
    SingularitySpectrum spectrum;
    WidthResult width;
};

/// Y(i) = sum_{k<=i} (x_k - mean(x)).
Profile compute_profile(std::span<const double> samples);
inline Profile compute_profile(const Signal& signal) { return compute_profile(signal.samples()); }

/// Detrended variance of one segment: mean squared residual of the
/// least-squares polynomial of degree `order` through `points`.
double detrended_variance(std::span<const double> points, int order);

/// F^2(s, v) for 1-based segment index v, counted from the start
/// (Forward) or the end (Backward) of the profile.
double segment_fluctuation(const Profile& profile, std::size_t scale, std::size_t segment,
                           int order, Direction direction);

/// q-order power mean of segment variances:
/// { mean_v [F^2_v]^{q/2} }^{1/q}, or exp{ mean_v ln F^2_v / 2 } for |q| <= q_zero_epsilon.
/// Evaluated in log space. Requires every variance > 0.
double q_order_fluctuation(std::span<const double> variances, double q, double q_zero_epsilon = 1e-9);

/// F_q(s) over the config's grids. Config must be resolved for the profile length.
FluctuationSurface fluctuation_function(const Profile& profile, const MfdfaConfig& config);

/// Per-q OLS of ln F_q(s) on ln s over the inclusive fit range.
HurstCurve fit_hurst(const FluctuationSurface& surface, FitRange fit_range);
HurstCurve fit_hurst(const FluctuationSurface& surface);

/// tau(q) = q h(q) - 1.
std::vector<double> tau_from_h(const HurstCurve& curve);

/// alpha = h + q h', f = q (alpha - h) + 1 with h' by central differences.
SingularitySpectrum legendre_spectrum(const HurstCurve& curve);

/// Width of the spectrum. QuadraticFit fits f = A d^2 + B d + 1 with
/// d = alpha - alpha0 over points with f >= 0.5 and returns the root
/// separation; SpectrumEndpoints returns max(alpha) - min(alpha).
WidthResult spectrum_width(const SingularitySpectrum& spectrum, WidthMethod method);

/// Full pipeline. Errors carry the failing stage in their message.
MfdfaResult analyze(const Signal& signal, const MfdfaConfig& config);
MfdfaResult analyze(std::span<const double> samples, const MfdfaConfig& config);

}  // namespace mfdfa
