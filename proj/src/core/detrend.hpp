#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfdfa::detail {

// Orthonormal polynomial basis of degree <= order on s equally spaced
// abscissae. Shared by every segment of one scale.
class DetrendBasis {
public:
    DetrendBasis(std::size_t length, int order);

    std::size_t length() const noexcept { return length_; }

    // Mean squared residual after projecting out the basis. Values at
    // rounding level relative to the segment magnitude are returned as 0.
    double residual_variance(std::span<const double> segment, std::vector<double>& scratch) const;

private:
    std::size_t length_;
    std::size_t columns_;
    std::vector<double> basis_;  // column-major, length_ x columns_
};

}  // namespace mfdfa::detail
