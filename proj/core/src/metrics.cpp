#include "prida/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace prida {

namespace {

// Kernel centered on an m x m canvas, zero elsewhere.
std::vector<double> centered_canvas(const Kernel& k, int m)
{
    std::vector<double> canvas(static_cast<std::size_t>(m) * m, 0.0);
    const int off = (m - k.side()) / 2;
    for (int v = 0; v < k.side(); ++v)
        for (int u = 0; u < k.side(); ++u)
            canvas[static_cast<std::size_t>(v + off) * m + (u + off)] = k(u, v);
    return canvas;
}

} // namespace

double endpoint_error(const Kernel& recovered, const Kernel& truth)
{
    const int m = std::max(recovered.side(), truth.side());
    const auto a = centered_canvas(recovered, m);
    const auto b = centered_canvas(truth, m);
    const auto at = [m](const std::vector<double>& img, int x, int y) {
        return (x >= 0 && x < m && y >= 0 && y < m) ? img[static_cast<std::size_t>(y) * m + x] : 0.0;
    };

    // sum_x (a(x) - b(x+d))^2 = |a|^2 + |b|^2 - 2 c(d), so the best shift
    // for correlation is also the best shift for the error; ties agree.
    int best_dx = 0, best_dy = 0;
    double best = -1.0;
    for (int dy = -(m - 1); dy <= m - 1; ++dy)
        for (int dx = -(m - 1); dx <= m - 1; ++dx) {
            double c = 0.0;
            for (int y = 0; y < m; ++y)
                for (int x = 0; x < m; ++x)
                    c += a[static_cast<std::size_t>(y) * m + x] * at(b, x + dx, y + dy);
            if (c > best) {
                best = c;
                best_dx = dx;
                best_dy = dy;
            }
        }

    double acc = 0.0;
    for (int y = std::min(0, -best_dy); y < m + std::max(0, -best_dy); ++y)
        for (int x = std::min(0, -best_dx); x < m + std::max(0, -best_dx); ++x) {
            const double diff = at(a, x, y) - at(b, x + best_dx, y + best_dy);
            acc += diff * diff;
        }
    return acc / (static_cast<double>(m) * m);
}

double psnr(const Image& recovered, const Image& truth)
{
    if (!recovered.same_shape(truth))
        throw ArgumentError("psnr: image dimensions differ");
    double acc = 0.0;
    const auto a = recovered.values();
    const auto b = truth.values();
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    const double mse = acc / static_cast<double>(a.size());
    if (mse == 0.0)
        return kPsnrIdentical;
    return 10.0 * std::log10(1.0 / mse);
}

} // namespace prida
