#include <algorithm>
#include <cmath>
#include <limits>

#include "core/detrend.hpp"
#include "mfdfa/core.hpp"
#include "mfdfa/error.hpp"

namespace mfdfa {

namespace detail {

DetrendBasis::DetrendBasis(std::size_t length, int order)
    : length_(length), columns_(static_cast<std::size_t>(order) + 1) {
    if (order < 1 || length < columns_ + 1) {
        fail(ErrorCode::InvalidArgument, "segment of " + std::to_string(length) +
                                             " points cannot be detrended at order " + std::to_string(order));
    }
    basis_.assign(length_ * columns_, 0.0);
    const double half = 0.5 * static_cast<double>(length_ - 1);
    // Gram-Schmidt on monomials of t in [-1, 1], applied twice per column.
    for (std::size_t j = 0; j < columns_; ++j) {
        double* col = basis_.data() + j * length_;
        for (std::size_t i = 0; i < length_; ++i) {
            const double t = (static_cast<double>(i) - half) / half;
            col[i] = std::pow(t, static_cast<double>(j));
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                const double* prev = basis_.data() + k * length_;
                double dot = 0.0;
                for (std::size_t i = 0; i < length_; ++i) dot += prev[i] * col[i];
                for (std::size_t i = 0; i < length_; ++i) col[i] -= dot * prev[i];
            }
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < length_; ++i) norm += col[i] * col[i];
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < length_; ++i) col[i] /= norm;
    }
}

double DetrendBasis::residual_variance(std::span<const double> segment, std::vector<double>& r) const {
    r.assign(segment.begin(), segment.end());
    double magnitude = 0.0;
    for (double v : r) magnitude = std::max(magnitude, std::abs(v));
    for (std::size_t j = 0; j < columns_; ++j) {
        const double* col = basis_.data() + j * length_;
        double dot = 0.0;
        for (std::size_t i = 0; i < length_; ++i) dot += col[i] * r[i];
        for (std::size_t i = 0; i < length_; ++i) r[i] -= dot * col[i];
    }
    double sum = 0.0;
    for (double v : r) sum += v * v;
    const double variance = sum / static_cast<double>(length_);
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * magnitude;
    return variance <= floor * floor ? 0.0 : variance;
}

}  // namespace detail

Profile compute_profile(std::span<const double> samples) {
    if (samples.empty()) fail(ErrorCode::EmptySignal, "cannot profile an empty series");
    // Neumaier-compensated mean.
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = samples[i];
        if (!std::isfinite(x)) fail(ErrorCode::Data, "non-finite sample at index " + std::to_string(i));
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    const double mean = (sum + carry) / static_cast<double>(samples.size());

    Profile profile;
    profile.values.resize(samples.size());
    double running = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        running += samples[i] - mean;
        profile.values[i] = running;
    }
    return profile;
}

double detrended_variance(std::span<const double> points, int order) {
    detail::DetrendBasis basis(points.size(), order);
    std::vector<double> scratch;
    return basis.residual_variance(points, scratch);
}

double segment_fluctuation(const Profile& profile, std::size_t scale, std::size_t segment, int order,
                           Direction direction) {
    const std::size_t n = profile.values.size();
    if (scale == 0 || segment == 0 || segment > n / scale) {
        fail(ErrorCode::InvalidArgument, "segment " + std::to_string(segment) + " out of range for scale " +
                                             std::to_string(scale));
    }
    if (scale < static_cast<std::size_t>(order) + 2) {
        fail(ErrorCode::InvalidArgument, "scale must be >= detrend order + 2");
    }
    const std::size_t start = direction == Direction::Forward ? (segment - 1) * scale : n - segment * scale;
    return detrended_variance(std::span<const double>(profile.values).subspan(start, scale), order);
}

}  // namespace mfdfa
