#pragma once

#include "prida/types.hpp"

namespace prida {

/// Forward differences; the last column of gx and last row of gy are zero.
struct GradientField {
    Image gx;
    Image gy;
};

GradientField gradient_field(const Image& f);

/// Smoothed total variation.
///   isotropic:   sum sqrt(gx^2 + gy^2 + eps^2) - eps
///   anisotropic: sum (sqrt(gx^2 + eps^2) - eps) + (sqrt(gy^2 + eps^2) - eps)
/// Both vanish on constant images and tend to the classical norms as eps -> 0.
double tv_value(const Image& f, TvVariant variant, double eps);

/// Gradient of tv_value with respect to every pixel.
Image tv_grad(const Image& f, TvVariant variant, double eps);

/// Upper bound on the Hessian norm of tv_value: ||D||^2 / eps <= 8 / eps.
inline double tv_curvature_bound(double eps) { return 8.0 / eps; }

} // namespace prida
