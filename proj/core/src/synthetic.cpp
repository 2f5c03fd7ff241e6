#include "prida/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "prida/conv.hpp"

namespace prida {

namespace {

// Distributes unit mass at (x, y) onto the four surrounding grid points.
void splat(std::vector<double>& w, int side, double x, double y, double mass)
{
    const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    const double tx = x - x0, ty = y - y0;
    const auto add = [&](int u, int v, double m) {
        if (u >= 0 && u < side && v >= 0 && v < side)
            w[static_cast<std::size_t>(v) * side + u] += m;
    };
    add(x0, y0, mass * (1 - tx) * (1 - ty));
    add(x0 + 1, y0, mass * tx * (1 - ty));
    add(x0, y0 + 1, mass * (1 - tx) * ty);
    add(x0 + 1, y0 + 1, mass * tx * ty);
}

// Uniform draws built from raw 64-bit output so scenes do not depend on the
// standard library's distribution implementation.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

Image synthetic_scene(int width, int height, std::uint64_t seed, int shapes)
{
    std::mt19937_64 rng(seed);
    Image img(width, height, 0.2 + 0.2 * unit(rng));
    for (int s = 0; s < shapes; ++s) {
        const double value = 0.1 + 0.8 * unit(rng);
        const double cx = unit(rng) * width, cy = unit(rng) * height;
        const double rx = (0.08 + 0.22 * unit(rng)) * width, ry = (0.08 + 0.22 * unit(rng)) * height;
        const bool disk = unit(rng) < 0.5;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
                const bool inside = disk ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
                if (inside)
                    img(x, y) = value;
            }
    }
    return img;
}

Kernel line_kernel(int side, double length, double angle_degrees)
{
    if (side <= 0 || side % 2 == 0)
        throw ArgumentError("line kernel needs an odd side");
    std::vector<double> w(static_cast<std::size_t>(side) * side, 0.0);
    const double c = side / 2;
    const double theta = angle_degrees * std::numbers::pi / 180.0;
    const double half = 0.5 * std::max(length - 1.0, 0.0);
    const int samples = std::max(1, static_cast<int>(std::ceil(length * 8)));
    for (int i = 0; i < samples; ++i) {
        const double s = samples == 1 ? 0.0 : -half + 2.0 * half * i / (samples - 1);
        splat(w, side, c + s * std::cos(theta), c + s * std::sin(theta), 1.0);
    }
    return normalized_kernel(side, std::move(w));
}

Kernel gaussian_kernel(int side, double sigma)
{
    if (side <= 0 || side % 2 == 0)
        throw ArgumentError("gaussian kernel needs an odd side");
    if (!(sigma > 0.0))
        throw ArgumentError("gaussian sigma must be positive");
    std::vector<double> w(static_cast<std::size_t>(side) * side);
    const int c = side / 2;
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u)
            w[static_cast<std::size_t>(v) * side + u] =
                std::exp(-((u - c) * (u - c) + (v - c) * (v - c)) / (2.0 * sigma * sigma));
    return normalized_kernel(side, std::move(w));
}

Kernel shake_kernel(int side, std::uint64_t seed)
{
    if (side < 3 || side % 2 == 0)
        throw ArgumentError("shake kernel needs an odd side >= 3");
    std::mt19937_64 rng(seed);
    std::vector<double> w(static_cast<std::size_t>(side) * side, 0.0);
    const double c = side / 2;
    const double radius = 0.45 * (side - 1);
    double x = c, y = c;
    double heading = 2.0 * std::numbers::pi * unit(rng);
    const int steps = 8 * side;
    for (int i = 0; i < steps; ++i) {
        heading += 0.6 * (unit(rng) - 0.5);
        double nx = x + 0.35 * std::cos(heading), ny = y + 0.35 * std::sin(heading);
        if (std::hypot(nx - c, ny - c) > radius) {
            heading += std::numbers::pi;
            nx = x;
            ny = y;
        }
        x = nx;
        y = ny;
        splat(w, side, x, y, 1.0);
    }
    return normalized_kernel(side, std::move(w));
}

Image blur(const Image& f, const Kernel& k, BoundaryMode mode) { return convolve(f, k, mode); }

} // namespace prida
