#pragma once

#include <cstdint>

#include "prida/types.hpp"

namespace prida {

/// Piecewise-constant test scene: a flat background with random rectangles
/// and disks of random intensity. Deterministic in the seed.
Image synthetic_scene(int width, int height, std::uint64_t seed, int shapes = 12);

/// Straight motion path through the center, anti-aliased, unit mass.
Kernel line_kernel(int side, double length, double angle_degrees);

/// Isotropic Gaussian restricted to the support, unit mass.
Kernel gaussian_kernel(int side, double sigma);

/// Curved camera-shake path: a seeded random walk through the center.
Kernel shake_kernel(int side, std::uint64_t seed);

/// A blurred observation b = f * k (no noise).
Image blur(const Image& f, const Kernel& k, BoundaryMode mode);

} // namespace prida
