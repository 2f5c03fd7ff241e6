#pragma once

#include <span>
#include <vector>

#include "prida/types.hpp"

namespace prida {

/// Non-owning square weight grid. Unlike Kernel it carries no simplex
/// invariant, so gradient checks can perturb individual entries.
struct KernelView {
    int side = 0;
    std::span<const double> weights;

    KernelView() = default;
    KernelView(int s, std::span<const double> w) : side(s), weights(w) {}
    KernelView(const Kernel& k) : side(k.side()), weights(k.weights()) {}
};

enum class ConvPath { automatic, direct, fft };

/// Direct summation below 7x7 kernels and 64x64 images, FFT otherwise.
ConvPath select_path(int width, int height, int side);

/// "Same"-size convolution with the kernel centered on its middle pixel:
/// out(x,y) = sum_{u,v} k(u,v) f(x-(u-c), y-(v-c)), out-of-range samples
/// wrapped (circular) or clamped to the nearest edge pixel (replicate).
Image convolve(const Image& f, KernelView k, BoundaryMode mode, ConvPath path = ConvPath::automatic);

/// Exact adjoint of f -> convolve(f, k) applied to r.
Image correlate(KernelView k, const Image& r, BoundaryMode mode, ConvPath path = ConvPath::automatic);

/// Exact adjoint of k -> convolve(f, k) applied to r, on a side x side support.
std::vector<double> correlate_support(const Image& f, const Image& r, int side, BoundaryMode mode,
                                      ConvPath path = ConvPath::automatic);

/// ||f*k - b||^2.
double data_term(const Image& f, KernelView k, const Objective& obj);

/// 2 * correlate(k, f*k - b).
Image grad_f_data(const Image& f, KernelView k, const Objective& obj);

/// 2 * correlate_support(f, f*k - b).
std::vector<double> grad_k_data(const Image& f, KernelView k, const Objective& obj);

struct DataEvaluation {
    double value = 0.0;
    Image residual;
    Image grad_f;
    std::vector<double> grad_k;
};

/// Value and both gradients of the data term, sharing one residual.
DataEvaluation evaluate_data(const Image& f, KernelView k, const Objective& obj);

} // namespace prida
