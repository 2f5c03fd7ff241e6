#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace prida::detail {

/// Real 2-D transform of a fixed width x height lattice (row-major).
/// Plans are cached per shape and shared; execution is thread-safe.
class RealFft2d {
public:
    RealFft2d(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t spectrum_size() const;

    std::vector<std::complex<double>> forward(const std::vector<double>& in) const;
    /// Unnormalized inverse; divide by width*height for the true inverse.
    std::vector<double> inverse(const std::vector<std::complex<double>>& in) const;

private:
    struct Plans;
    int width_;
    int height_;
    const Plans* plans_;
};

} // namespace prida::detail
