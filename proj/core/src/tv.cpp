#include "prida/tv.hpp"

#include <cmath>

namespace prida {

namespace {

void check_eps(double eps)
{
    if (!(eps > 0.0))
        throw ArgumentError("TV smoothing epsilon must be positive");
}

} // namespace

GradientField gradient_field(const Image& f)
{
    const int W = f.width(), H = f.height();
    GradientField g{Image(W, H, 0.0), Image(W, H, 0.0)};
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (x + 1 < W)
                g.gx(x, y) = f(x + 1, y) - f(x, y);
            if (y + 1 < H)
                g.gy(x, y) = f(x, y + 1) - f(x, y);
        }
    return g;
}

double tv_value(const Image& f, TvVariant variant, double eps)
{
    check_eps(eps);
    const auto g = gradient_field(f);
    const auto gx = g.gx.values();
    const auto gy = g.gy.values();
    const double eps2 = eps * eps;
    double acc = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        if (variant == TvVariant::isotropic_p2)
            acc += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eps2) - eps;
        else
            acc += (std::sqrt(gx[i] * gx[i] + eps2) - eps) + (std::sqrt(gy[i] * gy[i] + eps2) - eps);
    }
    return acc;
}

Image tv_grad(const Image& f, TvVariant variant, double eps)
{
    check_eps(eps);
    const int W = f.width(), H = f.height();
    const auto g = gradient_field(f);
    const double eps2 = eps * eps;
    Image out(W, H, 0.0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const double dx = g.gx(x, y), dy = g.gy(x, y);
            double px, py;
            if (variant == TvVariant::isotropic_p2) {
                const double norm = std::sqrt(dx * dx + dy * dy + eps2);
                px = dx / norm;
                py = dy / norm;
            } else {
                px = dx / std::sqrt(dx * dx + eps2);
                py = dy / std::sqrt(dy * dy + eps2);
            }
            // Adjoint of the forward difference; the clamped edge term is constant.
            if (x + 1 < W) {
                out(x, y) -= px;
                out(x + 1, y) += px;
            }
            if (y + 1 < H) {
                out(x, y) -= py;
                out(x, y + 1) += py;
            }
        }
    return out;
}

} // namespace prida
