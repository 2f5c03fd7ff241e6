#include "prida/pyramid.hpp"

#include <algorithm>
#include <cmath>

namespace prida {

namespace {

struct AxisTap {
    int index;
    double weight;
};

// Area-overlap weights mapping n_in samples onto n_out >= 1 bins.
std::vector<std::vector<AxisTap>> area_weights(int n_in, int n_out)
{
    std::vector<std::vector<AxisTap>> taps(static_cast<std::size_t>(n_out));
    const double span = static_cast<double>(n_in) / n_out;
    for (int o = 0; o < n_out; ++o) {
        const double lo = o * span, hi = (o + 1) * span;
        for (int i = static_cast<int>(std::floor(lo)); i < std::min(n_in, static_cast<int>(std::ceil(hi))); ++i) {
            const double overlap = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
            if (overlap > 0.0)
                taps[o].push_back({i, overlap / span});
        }
    }
    return taps;
}

struct LinearTap {
    int lo;
    int hi;
    double t;
};

std::vector<LinearTap> bilinear_taps(int n_in, int n_out)
{
    std::vector<LinearTap> taps(static_cast<std::size_t>(n_out));
    const double ratio = static_cast<double>(n_in) / n_out;
    for (int o = 0; o < n_out; ++o) {
        const double src = std::clamp((o + 0.5) * ratio - 0.5, 0.0, static_cast<double>(n_in - 1));
        const int lo = static_cast<int>(std::floor(src));
        const int hi = std::min(lo + 1, n_in - 1);
        taps[o] = {lo, hi, src - lo};
    }
    return taps;
}

} // namespace

int round_to_odd(double x)
{
    const int odd = 2 * static_cast<int>(std::lround((x - 1.0) / 2.0)) + 1;
    return std::max(odd, kMinKernelSide);
}

PyramidPlan build_plan(int width, int height, int kernel_side, double scale_factor)
{
    if (kernel_side <= 0 || kernel_side % 2 == 0)
        throw ArgumentError("kernel side must be a positive odd integer, got " + std::to_string(kernel_side));
    if (!(scale_factor > 0.0 && scale_factor < 1.0))
        throw ArgumentError("pyramid scale factor must lie in (0,1)");
    if (width <= 0 || height <= 0)
        throw ArgumentError("image dimensions must be positive");
    if (kernel_side > std::min(width, height))
        throw ArgumentError("kernel larger than image");

    std::vector<int> sides{kernel_side};
    while (sides.back() > kMinKernelSide) {
        int next = round_to_odd(sides.back() * scale_factor);
        if (next >= sides.back())
            next = sides.back() - 2;
        sides.push_back(next);
    }

    PyramidPlan plan;
    plan.scale_factor = scale_factor;
    for (std::size_t j = 0; j < sides.size(); ++j) {
        const double shrink = std::pow(scale_factor, static_cast<double>(j));
        PyramidLevel level;
        level.kernel_side = sides[j];
        level.width = std::max(static_cast<int>(std::lround(width * shrink)), sides[j]);
        level.height = std::max(static_cast<int>(std::lround(height * shrink)), sides[j]);
        level.width = std::min(level.width, width);
        level.height = std::min(level.height, height);
        plan.levels.push_back(level);
    }
    std::reverse(plan.levels.begin(), plan.levels.end());
    return plan;
}

Image upscale_image(const Image& img, int width, int height)
{
    if (width < img.width() || height < img.height())
        throw ArgumentError("upscale_image cannot shrink an image");
    if (width == img.width() && height == img.height())
        return img;
    const auto tx = bilinear_taps(img.width(), width);
    const auto ty = bilinear_taps(img.height(), height);
    Image out(width, height);
    for (int y = 0; y < height; ++y) {
        const auto& vy = ty[y];
        for (int x = 0; x < width; ++x) {
            const auto& vx = tx[x];
            const double top = (1.0 - vx.t) * img(vx.lo, vy.lo) + vx.t * img(vx.hi, vy.lo);
            const double bottom = (1.0 - vx.t) * img(vx.lo, vy.hi) + vx.t * img(vx.hi, vy.hi);
            out(x, y) = (1.0 - vy.t) * top + vy.t * bottom;
        }
    }
    return out;
}

Image downscale_image(const Image& img, int width, int height)
{
    if (width > img.width() || height > img.height())
        throw ArgumentError("downscale_image cannot enlarge an image");
    if (width == img.width() && height == img.height())
        return img;
    const auto wx = area_weights(img.width(), width);
    const auto wy = area_weights(img.height(), height);
    Image out(width, height, 0.0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (const auto& ay : wy[y])
                for (const auto& ax : wx[x])
                    acc += ay.weight * ax.weight * img(ax.index, ay.index);
            out(x, y) = acc;
        }
    return out;
}

Kernel upscale_kernel(const Kernel& k, int new_side)
{
    if (new_side <= 0 || new_side % 2 == 0)
        throw ArgumentError("upscale_kernel requires an odd side, got " + std::to_string(new_side));
    if (new_side < k.side())
        throw ArgumentError("upscale_kernel cannot shrink a kernel");
    if (new_side == k.side())
        return k;

    const int old_side = k.side();
    const double ratio = static_cast<double>(old_side) / new_side;
    const double c_old = old_side / 2, c_new = new_side / 2;
    const auto sample = [&](int u, int v) {
        return (u >= 0 && u < old_side && v >= 0 && v < old_side) ? k(u, v) : 0.0;
    };
    std::vector<double> w(static_cast<std::size_t>(new_side) * new_side);
    for (int y = 0; y < new_side; ++y) {
        const double sy = c_old + (y - c_new) * ratio;
        const int y0 = static_cast<int>(std::floor(sy));
        const double ty = sy - y0;
        for (int x = 0; x < new_side; ++x) {
            const double sx = c_old + (x - c_new) * ratio;
            const int x0 = static_cast<int>(std::floor(sx));
            const double tx = sx - x0;
            const double top = (1.0 - tx) * sample(x0, y0) + tx * sample(x0 + 1, y0);
            const double bottom = (1.0 - tx) * sample(x0, y0 + 1) + tx * sample(x0 + 1, y0 + 1);
            w[static_cast<std::size_t>(y) * new_side + x] = std::max((1.0 - ty) * top + ty * bottom, kKernelFloor);
        }
    }
    return normalized_kernel(new_side, std::move(w));
}

WarmStart coarse_warm_start(const Image& blurred, int kernel_side, const ObjectiveParams& params,
                            const SolverConfig& cfg, double scale_factor)
{
    const PyramidPlan plan = build_plan(blurred.width(), blurred.height(), kernel_side, scale_factor);
    WarmStart warm{Image{}, Kernel{}, {}};
    for (std::size_t i = 0; i + 1 < plan.levels.size(); ++i) {
        const auto& level = plan.levels[i];
        Objective obj = params.with_observation(downscale_image(blurred, level.width, level.height));
        Image f0 = i == 0 ? obj.blurred : upscale_image(warm.f, level.width, level.height);
        Kernel k0 = i == 0 ? uniform_kernel(level.kernel_side) : upscale_kernel(warm.k, level.kernel_side);
        IterateState result = solve(std::move(f0), std::move(k0), obj, cfg);
        warm.f = std::move(result.f);
        warm.k = std::move(result.k);
        warm.traces.push_back(std::move(result.trace));
    }
    const auto& finest = plan.levels.back();
    if (plan.levels.size() == 1) {
        warm.f = blurred;
        warm.k = uniform_kernel(finest.kernel_side);
    } else {
        warm.f = upscale_image(warm.f, finest.width, finest.height);
        warm.k = upscale_kernel(warm.k, finest.kernel_side);
    }
    return warm;
}

MultiscaleResult solve_multiscale(const Image& blurred, int kernel_side, const ObjectiveParams& params,
                                  const SolverConfig& cfg, double scale_factor)
{
    cfg.validate();
    WarmStart warm = coarse_warm_start(blurred, kernel_side, params, cfg, scale_factor);
    const Objective obj = params.with_observation(blurred);
    IterateState result = solve(std::move(warm.f), std::move(warm.k), obj, cfg);

    MultiscaleResult out;
    out.plan = build_plan(blurred.width(), blurred.height(), kernel_side, scale_factor);
    out.traces = std::move(warm.traces);
    out.total_iterations = result.t;
    for (const auto& trace : out.traces)
        out.total_iterations += static_cast<int>(trace.size());
    out.traces.push_back(std::move(result.trace));
    out.final_objective = result.objective;
    out.f = std::move(result.f);
    out.k = std::move(result.k);
    return out;
}

} // namespace prida
