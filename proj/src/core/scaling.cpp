#include <algorithm>
#include <cmath>
#include <limits>

#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"

namespace mfdfa {

std::size_t HurstCurve::index_of(double q) const {
    if (q_grid.empty()) fail(ErrorCode::InvalidArgument, "empty Hurst curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < q_grid.size(); ++i) {
        if (std::abs(q_grid[i] - q) < std::abs(q_grid[best] - q)) best = i;
    }
    return best;
}

HurstCurve fit_hurst(const FluctuationSurface& surface, FitRange fit_range) {
    const std::size_t scales = surface.scale_grid.size();
    if (fit_range.first > fit_range.last || fit_range.last >= scales) {
        fail(ErrorCode::InvalidArgument, "fit range outside scale grid");
    }
    const std::size_t count = fit_range.last - fit_range.first + 1;
    if (count < 4) {
        fail(ErrorCode::InsufficientScales,
             "log-log regression needs at least 4 scales, fit range has " + std::to_string(count));
    }
    if (surface.values.size() != surface.q_grid.size()) {
        fail(ErrorCode::InvalidArgument, "surface rows do not match q grid");
    }

    std::vector<double> x(count);
    double x_mean = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        x[i] = std::log(static_cast<double>(surface.scale_grid[fit_range.first + i]));
        x_mean += x[i];
    }
    x_mean /= static_cast<double>(count);
    double sxx = 0.0;
    for (double xi : x) sxx += (xi - x_mean) * (xi - x_mean);

    HurstCurve curve;
    curve.q_grid = surface.q_grid;
    curve.h.resize(surface.q_grid.size());
    curve.intercepts.resize(surface.q_grid.size());
    curve.r_squared.resize(surface.q_grid.size());
    std::vector<double> y(count);
    for (std::size_t qi = 0; qi < surface.q_grid.size(); ++qi) {
        const auto& row = surface.values[qi];
        if (row.size() != scales) fail(ErrorCode::InvalidArgument, "surface row length mismatch");
        double y_mean = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double f = row[fit_range.first + i];
            if (!(f > 0.0) || !std::isfinite(f)) {
                fail(ErrorCode::Data, "fluctuation function must be finite and > 0");
            }
            y[i] = std::log(f);
            y_mean += y[i];
        }
        y_mean /= static_cast<double>(count);
        double sxy = 0.0;
        double syy = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            sxy += (x[i] - x_mean) * (y[i] - y_mean);
            syy += (y[i] - y_mean) * (y[i] - y_mean);
        }
        const double slope = sxy / sxx;
        const double intercept = y_mean - slope * x_mean;
        double ss_res = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double e = y[i] - (intercept + slope * x[i]);
            ss_res += e * e;
        }
        double r2 = 1.0;
        if (syy > 0.0) r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
        curve.h[qi] = slope;
        curve.intercepts[qi] = intercept;
        curve.r_squared[qi] = r2;
    }
    return curve;
}

HurstCurve fit_hurst(const FluctuationSurface& surface) {
    if (surface.scale_grid.empty()) fail(ErrorCode::InsufficientScales, "empty scale grid");
    return fit_hurst(surface, FitRange{0, surface.scale_grid.size() - 1});
}

std::vector<double> tau_from_h(const HurstCurve& curve) {
    std::vector<double> tau(curve.h.size());
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = curve.q_grid[i] * curve.h[i] - 1.0;
    return tau;
}

}  // namespace mfdfa
