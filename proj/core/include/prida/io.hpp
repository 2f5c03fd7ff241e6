#pragma once

#include <filesystem>
#include <string>

#include "prida/types.hpp"

namespace prida {

/// Reads a binary PGM (P5, maxval up to 65535) or a PNG. Color PNGs are
/// reduced to gray by averaging channels; alpha is dropped. Intensities are
/// scaled to [0,1].
Image load_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale image, PGM or PNG chosen by extension.
/// Values are clamped to [0,1] and rounded to the nearest level.
void save_image(const Image& img, const std::filesystem::path& path);

/// Plain-text kernel: "side side" header then side rows of decimals.
void save_kernel(const Kernel& k, const std::filesystem::path& path);
Kernel load_kernel(const std::filesystem::path& path);
std::string format_kernel(const Kernel& k);

/// Kernel rescaled so its largest weight maps to white, for visual inspection.
Image kernel_preview(const Kernel& k);

void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Shortest round-trip decimal; always contains a '.' or exponent.
std::string format_double(double v);

} // namespace prida
