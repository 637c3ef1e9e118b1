#include <algorithm>
#include <cmath>

#include "core/detrend.hpp"
#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"

namespace mfdfa {

double q_order_fluctuation(std::span<const double> variances, double q, double q_zero_epsilon) {
    if (variances.empty()) fail(ErrorCode::InvalidArgument, "no segment variances");
    for (double v : variances) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            fail(ErrorCode::DegenerateSegment, "segment variance must be finite and > 0");
        }
    }
    const double count = static_cast<double>(variances.size());
    if (std::abs(q) <= q_zero_epsilon) {
        double sum = 0.0;
        for (double v : variances) sum += std::log(v);
        return std::exp(0.5 * sum / count);
    }
    // ln F_q = ln(v_ext) / 2 + (ln sum_v exp(q/2 (ln v - ln v_ext)) - ln count) / q,
    // with v_ext the variance that dominates the sum for this sign of q.
    const auto [lo, hi] = std::minmax_element(variances.begin(), variances.end());
    const double log_ext = std::log(q > 0.0 ? *hi : *lo);
    double sum = 0.0;
    for (double v : variances) sum += std::exp(0.5 * q * (std::log(v) - log_ext));
    return std::exp(0.5 * log_ext + (std::log(sum) - std::log(count)) / q);
}

FluctuationSurface fluctuation_function(const Profile& profile, const MfdfaConfig& config) {
    const std::size_t n = profile.values.size();
    config.validate(n);

    FluctuationSurface surface;
    surface.q_grid = config.q_grid;
    surface.scale_grid = config.scale_grid;
    surface.values.assign(config.q_grid.size(), std::vector<double>(config.scale_grid.size(), 0.0));
    surface.segment_counts.resize(config.scale_grid.size());

    const std::span<const double> y(profile.values);
    std::vector<double> variances;
    std::vector<double> scratch;
    for (std::size_t si = 0; si < config.scale_grid.size(); ++si) {
        const std::size_t s = config.scale_grid[si];
        const std::size_t segments = n / s;
        const detail::DetrendBasis basis(s, config.detrend_order);
        variances.clear();
        auto add = [&](std::size_t start, std::size_t index, const char* direction) {
            const double v = basis.residual_variance(y.subspan(start, s), scratch);
            if (v == 0.0) {
                throw DegenerateSegmentError(
                    s, index,
                    "zero fluctuation in segment v=" + std::to_string(index) + " (" + direction +
                        ") at scale s=" + std::to_string(s) + "; negative-q moments diverge");
            }
            variances.push_back(v);
        };
        for (std::size_t v = 0; v < segments; ++v) add(v * s, v + 1, "forward");
        if (config.bidirectional) {
            for (std::size_t v = 0; v < segments; ++v) add(n - (v + 1) * s, v + 1, "backward");
        }
        surface.segment_counts[si] = variances.size();
        for (std::size_t qi = 0; qi < config.q_grid.size(); ++qi) {
            surface.values[qi][si] = q_order_fluctuation(variances, config.q_grid[qi], config.q_zero_epsilon);
        }
    }
    return surface;
}

}  // namespace mfdfa
