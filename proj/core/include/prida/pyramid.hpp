#pragma once

#include <cmath>
#include <vector>

#include "prida/optimizer.hpp"
#include "prida/types.hpp"

namespace prida {

struct PyramidLevel {
    int width = 0;
    int height = 0;
    int kernel_side = 0;
};

/// Coarsest level first; the last level is the input resolution.
struct PyramidPlan {
    std::vector<PyramidLevel> levels;
    double scale_factor = 1.0 / std::sqrt(2.0);
};

inline constexpr int kMinKernelSide = 3;

/// Nearest odd integer to x, never below kMinKernelSide.
int round_to_odd(double x);

/// Shrinks the kernel side by scale_factor per level (rounded to the nearest
/// odd value, floored at 3) until it reaches 3. Image dimensions scale by the
/// same factor per level and never drop below the level's kernel side.
PyramidPlan build_plan(int width, int height, int kernel_side, double scale_factor = 1.0 / std::sqrt(2.0));

/// Bilinear resampling to a larger (or equal) lattice, pixel centers aligned.
Image upscale_image(const Image& img, int width, int height);

/// Area-averaging downsample (each output pixel is the mean of the input
/// area it covers, with fractional overlaps weighted).
Image downscale_image(const Image& img, int width, int height);

/// Bilinear resampling about the center, zero outside the old support,
/// entries floored at 1e-12 and renormalized to the simplex.
Kernel upscale_kernel(const Kernel& k, int new_side);

inline constexpr double kKernelFloor = 1e-12;

struct MultiscaleResult {
    Image f;
    Kernel k;
    std::vector<Trace> traces;
    PyramidPlan plan;
    double final_objective = 0.0;
    int total_iterations = 0;
};

/// Objective parameters shared by every level; the observation is replaced
/// per level by the downscaled input.
struct ObjectiveParams {
    double lambda = 6e-4;
    TvVariant tv_variant = TvVariant::isotropic_p2;
    BoundaryMode boundary = BoundaryMode::circular;
    double tv_epsilon = 1e-3;

    Objective with_observation(Image b) const { return Objective{std::move(b), lambda, tv_variant, boundary, tv_epsilon}; }
};

MultiscaleResult solve_multiscale(const Image& blurred, int kernel_side, const ObjectiveParams& params,
                                  const SolverConfig& cfg, double scale_factor = 1.0 / std::sqrt(2.0));

/// Warm start for the finest level: runs every coarser level and upsamples
/// the result. For single-level plans this is (b, uniform kernel).
struct WarmStart {
    Image f;
    Kernel k;
    std::vector<Trace> traces;
};

WarmStart coarse_warm_start(const Image& blurred, int kernel_side, const ObjectiveParams& params,
                            const SolverConfig& cfg, double scale_factor = 1.0 / std::sqrt(2.0));

} // namespace prida
