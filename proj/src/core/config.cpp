#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"

namespace mfdfa {

const char* width_method_name(WidthMethod method) noexcept {
    return method == WidthMethod::QuadraticFit ? "quadratic" : "endpoints";
}

std::optional<WidthMethod> parse_width_method(std::string_view text) noexcept {
    if (text == "quadratic" || text == "quadratic-fit") return WidthMethod::QuadraticFit;
    if (text == "endpoints" || text == "spectrum-endpoints") return WidthMethod::SpectrumEndpoints;
    return std::nullopt;
}

std::vector<double> MfdfaConfig::uniform_q_grid(double q_min, double q_max, double q_step) {
    if (!std::isfinite(q_min) || !std::isfinite(q_max) || !(q_step > 0.0) || !std::isfinite(q_step) ||
        q_max < q_min) {
        fail(ErrorCode::Config, "q range requires finite q_min <= q_max and q_step > 0");
    }
    const auto steps = static_cast<std::size_t>(std::floor((q_max - q_min) / q_step + 1e-9));
    if (steps > 100000) fail(ErrorCode::Config, "q grid too dense");
    std::vector<double> grid;
    grid.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        double q = q_min + static_cast<double>(i) * q_step;
        const double nearest = std::round(q);
        if (std::abs(q - nearest) < 1e-9) q = nearest;
        grid.push_back(q);
    }
    return grid;
}

std::vector<std::size_t> log_spaced_scales(std::size_t min, std::size_t max, std::size_t count) {
    if (min == 0 || max < min || count == 0) {
        fail(ErrorCode::Config, "scale range requires 0 < min <= max and count >= 1");
    }
    std::vector<std::size_t> scales;
    if (count == 1 || min == max) {
        scales.push_back(min);
        return scales;
    }
    const double lo = std::log(static_cast<double>(min));
    const double hi = std::log(static_cast<double>(max));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        auto s = static_cast<std::size_t>(std::llround(std::exp(lo + t * (hi - lo))));
        s = std::clamp(s, min, max);
        if (scales.empty() || s > scales.back()) scales.push_back(s);
    }
    return scales;
}

FitRange MfdfaConfig::effective_fit_range() const {
    if (fit_range) return *fit_range;
    return FitRange{0, scale_grid.empty() ? 0 : scale_grid.size() - 1};
}

void MfdfaConfig::validate_static() const {
    if (q_grid.size() < 3) fail(ErrorCode::Config, "q grid needs at least 3 values");
    bool has_two = false;
    bool has_negative = false;
    bool has_positive = false;
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        const double q = q_grid[i];
        if (!std::isfinite(q)) fail(ErrorCode::Config, "q grid contains a non-finite value");
        if (i > 0 && !(q > q_grid[i - 1])) fail(ErrorCode::Config, "q grid must be strictly increasing");
        has_two = has_two || std::abs(q - 2.0) < 1e-12;
        has_negative = has_negative || q < 0.0;
        has_positive = has_positive || q > 0.0;
    }
    if (!has_two) fail(ErrorCode::Config, "q grid must include q = 2");
    if (!has_negative || !has_positive) fail(ErrorCode::Config, "q grid must span both signs");
    if (!(q_zero_epsilon >= 0.0)) fail(ErrorCode::Config, "q_zero_epsilon must be >= 0");
    if (detrend_order < 1) fail(ErrorCode::Config, "detrend order must be >= 1");

    if (scale_grid.empty()) {
        if (scale_min < static_cast<std::size_t>(detrend_order) + 2) {
            fail(ErrorCode::Config, "scale_min must be >= detrend order + 2");
        }
        if (scale_max != 0 && scale_max < scale_min) fail(ErrorCode::Config, "scale_max < scale_min");
        if (scale_count < 4) fail(ErrorCode::InsufficientScales, "scale_count must be >= 4");
        return;
    }
    const auto min_scale = static_cast<std::size_t>(detrend_order) + 2;
    for (std::size_t i = 0; i < scale_grid.size(); ++i) {
        if (i > 0 && scale_grid[i] <= scale_grid[i - 1]) {
            fail(ErrorCode::Config, "scale grid must be strictly increasing");
        }
        if (scale_grid[i] < min_scale) {
            fail(ErrorCode::Config, "scale " + std::to_string(scale_grid[i]) + " < detrend order + 2");
        }
    }
    const FitRange range = effective_fit_range();
    if (range.first > range.last || range.last >= scale_grid.size()) {
        fail(ErrorCode::Config, "fit range outside scale grid");
    }
    if (range.last - range.first + 1 < 4) {
        fail(ErrorCode::InsufficientScales, "fit range holds fewer than 4 scales");
    }
}

void MfdfaConfig::validate(std::size_t n) const {
    if (scale_grid.empty()) {
        resolved(n);
        return;
    }
    validate_static();
    if (n < 4 * scale_grid.front()) {
        fail(ErrorCode::Config, "series of " + std::to_string(n) + " samples is shorter than 4 x min scale (" +
                                    std::to_string(4 * scale_grid.front()) + ")");
    }
    if (scale_grid.back() > n / 4) {
        fail(ErrorCode::Config, "max scale " + std::to_string(scale_grid.back()) + " exceeds floor(N/4) = " +
                                    std::to_string(n / 4));
    }
}

MfdfaConfig MfdfaConfig::resolved(std::size_t n) const {
    MfdfaConfig config = *this;
    if (config.scale_grid.empty()) {
        if (n < 4 * scale_min) {
            fail(ErrorCode::Config, "series of " + std::to_string(n) +
                                        " samples is shorter than 4 x min scale (" +
                                        std::to_string(4 * scale_min) + ")");
        }
        const std::size_t max = scale_max == 0 ? n / 4 : scale_max;
        config.scale_grid = log_spaced_scales(scale_min, max, scale_count);
    }
    config.validate(n);
    return config;
}

}  // namespace mfdfa
