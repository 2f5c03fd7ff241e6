#pragma once

#include "prida/types.hpp"

namespace prida {

inline constexpr double kPsnrIdentical = 99.0;

/// Shift-aligned mean squared difference between two kernels.
///
/// Both kernels are zero-padded to the larger side m, aligned by the integer
/// shift that maximizes their cross-correlation, and the squared difference
/// over the aligned pair is averaged over m*m entries. Symmetric in its
/// arguments and invariant to integer shifts of either kernel.
double endpoint_error(const Kernel& recovered, const Kernel& truth);

/// 10 log10(1 / MSE) with unit peak; identical images give kPsnrIdentical.
double psnr(const Image& recovered, const Image& truth);

struct EvalReport {
    double endpoint_error = 0.0;
    double psnr_db = 0.0;
    double objective_final = 0.0;
    int iters_total = 0;
};

} // namespace prida
