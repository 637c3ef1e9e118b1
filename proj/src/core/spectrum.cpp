#include <algorithm>
#include <cmath>
#include <limits>

#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"

namespace mfdfa {

namespace {

constexpr double kNeighbourhoodFloor = 0.5;

std::size_t distinct_count(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return static_cast<std::size_t>(std::unique(values.begin(), values.end()) - values.begin());
}

std::size_t apex_index(const SingularitySpectrum& spectrum) {
    return static_cast<std::size_t>(std::max_element(spectrum.f_alpha.begin(), spectrum.f_alpha.end()) -
                                    spectrum.f_alpha.begin());
}

// Least squares for f - 1 = A d^2 + B d, d = alpha - alpha0.
WidthResult quadratic_width(const SingularitySpectrum& spectrum) {
    const std::size_t apex = apex_index(spectrum);
    const double alpha0 = spectrum.alpha[apex];

    std::vector<std::size_t> points;
    for (std::size_t i = 0; i < spectrum.alpha.size(); ++i) {
        if (spectrum.f_alpha[i] >= kNeighbourhoodFloor) points.push_back(i);
    }
    if (points.size() < 3) {
        points.clear();
        for (std::size_t i = 0; i < spectrum.alpha.size(); ++i) points.push_back(i);
    }

    double s2 = 0.0, s3 = 0.0, s4 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i : points) {
        const double d = spectrum.alpha[i] - alpha0;
        const double g = spectrum.f_alpha[i] - 1.0;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
        g1 += g * d;
        g2 += g * d2;
    }
    const double det = s4 * s2 - s3 * s3;
    if (!(std::abs(det) > std::numeric_limits<double>::min()) || !(s2 > 0.0)) {
        fail(ErrorCode::InsufficientSpectrum, "spectrum neighbourhood has too few distinct alpha values");
    }
    const double a = (g2 * s2 - s3 * g1) / det;
    const double b = (s4 * g1 - s3 * g2) / det;
    if (!(a < 0.0)) {
        fail(ErrorCode::NonConcaveSpectrum, "fitted parabola is not concave (A = " + std::to_string(a) + ")");
    }
    // A < 0 and C = 1 guarantee real roots.
    const double disc = b * b - 4.0 * a;

    WidthResult result;
    result.method = WidthMethod::QuadraticFit;
    result.alpha0 = alpha0;
    result.asymmetry = b;
    result.quadratic = QuadraticCoefficients{a, b, 1.0};
    result.width = std::sqrt(disc) / -a;
    return result;
}

}  // namespace

SingularitySpectrum legendre_spectrum(const HurstCurve& curve) {
    const std::size_t n = curve.q_grid.size();
    if (n < 3 || curve.h.size() != n) {
        fail(ErrorCode::InsufficientSpectrum, "Legendre transform needs at least 3 q values");
    }
    std::vector<double> slope(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        slope[i] = (curve.h[hi] - curve.h[lo]) / (curve.q_grid[hi] - curve.q_grid[lo]);
    }
    SingularitySpectrum spectrum;
    spectrum.q_grid = curve.q_grid;
    spectrum.tau = tau_from_h(curve);
    spectrum.alpha.resize(n);
    spectrum.f_alpha.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = curve.q_grid[i];
        spectrum.alpha[i] = curve.h[i] + q * slope[i];
        spectrum.f_alpha[i] = q * (spectrum.alpha[i] - curve.h[i]) + 1.0;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (spectrum.alpha[i] > spectrum.alpha[i - 1]) spectrum.alpha_monotone = false;
    }
    return spectrum;
}

WidthResult spectrum_width(const SingularitySpectrum& spectrum, WidthMethod method) {
    if (spectrum.alpha.size() != spectrum.f_alpha.size()) {
        fail(ErrorCode::InvalidArgument, "alpha and f(alpha) lengths differ");
    }
    if (spectrum.alpha.size() < 3 || distinct_count(spectrum.alpha) < 3) {
        fail(ErrorCode::InsufficientSpectrum, "spectrum needs at least 3 distinct alpha values");
    }
    if (method == WidthMethod::QuadraticFit) return quadratic_width(spectrum);

    WidthResult result;
    result.method = WidthMethod::SpectrumEndpoints;
    const auto [lo, hi] = std::minmax_element(spectrum.alpha.begin(), spectrum.alpha.end());
    result.width = *hi - *lo;
    result.alpha0 = spectrum.alpha[apex_index(spectrum)];
    try {
        const WidthResult fit = quadratic_width(spectrum);
        result.asymmetry = fit.asymmetry;
        result.quadratic = fit.quadratic;
    } catch (const Error&) {
        result.asymmetry = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

}  // namespace mfdfa
