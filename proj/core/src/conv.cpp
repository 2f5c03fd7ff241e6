#include "prida/conv.hpp"

#include <algorithm>
#include <complex>

#include "fft.hpp"

namespace prida {

namespace {

int wrap(int i, int n)
{
    i %= n;
    return i < 0 ? i + n : i;
}

int source_index(int i, int n, BoundaryMode mode)
{
    return mode == BoundaryMode::circular ? wrap(i, n) : std::clamp(i, 0, n - 1);
}

void check_fits(int width, int height, int side)
{
    if (side <= 0 || side % 2 == 0)
        throw ArgumentError("kernel side must be a positive odd integer");
    if (side > std::min(width, height))
        throw ArgumentError("kernel side " + std::to_string(side) + " exceeds image size " + std::to_string(width) +
                            "x" + std::to_string(height));
}

ConvPath resolve(ConvPath path, int width, int height, int side)
{
    return path == ConvPath::automatic ? select_path(width, height, side) : path;
}

// Index tables: offset_table[u][x] = source column for output column x and
// kernel column u.
std::vector<std::vector<int>> offset_table(int n, int side, BoundaryMode mode)
{
    const int c = side / 2;
    std::vector<std::vector<int>> table(static_cast<std::size_t>(side), std::vector<int>(static_cast<std::size_t>(n)));
    for (int u = 0; u < side; ++u)
        for (int x = 0; x < n; ++x)
            table[u][x] = source_index(x - (u - c), n, mode);
    return table;
}

Image convolve_direct(const Image& f, KernelView k, BoundaryMode mode)
{
    const int W = f.width(), H = f.height(), side = k.side;
    const auto cols = offset_table(W, side, mode);
    const auto rows = offset_table(H, side, mode);
    Image out(W, H, 0.0);
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u) {
            const double w = k.weights[static_cast<std::size_t>(v) * side + u];
            if (w == 0.0)
                continue;
            for (int y = 0; y < H; ++y) {
                const int sy = rows[v][y];
                for (int x = 0; x < W; ++x)
                    out(x, y) += w * f(cols[u][x], sy);
            }
        }
    return out;
}

Image correlate_direct(KernelView k, const Image& r, BoundaryMode mode)
{
    const int W = r.width(), H = r.height(), side = k.side;
    const auto cols = offset_table(W, side, mode);
    const auto rows = offset_table(H, side, mode);
    Image out(W, H, 0.0);
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u) {
            const double w = k.weights[static_cast<std::size_t>(v) * side + u];
            if (w == 0.0)
                continue;
            for (int y = 0; y < H; ++y) {
                const int sy = rows[v][y];
                for (int x = 0; x < W; ++x)
                    out(cols[u][x], sy) += w * r(x, y);
            }
        }
    return out;
}

std::vector<double> correlate_support_direct(const Image& f, const Image& r, int side, BoundaryMode mode)
{
    const int W = f.width(), H = f.height();
    const auto cols = offset_table(W, side, mode);
    const auto rows = offset_table(H, side, mode);
    std::vector<double> g(static_cast<std::size_t>(side) * side, 0.0);
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u) {
            double acc = 0.0;
            for (int y = 0; y < H; ++y) {
                const int sy = rows[v][y];
                for (int x = 0; x < W; ++x)
                    acc += r(x, y) * f(cols[u][x], sy);
            }
            g[static_cast<std::size_t>(v) * side + u] = acc;
        }
    return g;
}

// FFT path. Replicate mode pads the lattice by the kernel radius so the
// circular transform never wraps into the cropped region.
struct Lattice {
    int width, height, pad;
    int pw() const { return width + 2 * pad; }
    int ph() const { return height + 2 * pad; }
    std::size_t size() const { return static_cast<std::size_t>(pw()) * ph(); }
    std::size_t at(int i, int j) const { return static_cast<std::size_t>(j) * pw() + i; }
};

Lattice lattice_for(int width, int height, int side, BoundaryMode mode)
{
    return {width, height, mode == BoundaryMode::replicate ? side / 2 : 0};
}

std::vector<double> extend(const Image& f, const Lattice& L)
{
    std::vector<double> out(L.size());
    for (int j = 0; j < L.ph(); ++j)
        for (int i = 0; i < L.pw(); ++i)
            out[L.at(i, j)] = f(std::clamp(i - L.pad, 0, L.width - 1), std::clamp(j - L.pad, 0, L.height - 1));
    return out;
}

std::vector<double> embed(const Image& r, const Lattice& L)
{
    std::vector<double> out(L.size(), 0.0);
    for (int y = 0; y < L.height; ++y)
        for (int x = 0; x < L.width; ++x)
            out[L.at(x + L.pad, y + L.pad)] = r(x, y);
    return out;
}

std::vector<double> kernel_array(KernelView k, const Lattice& L)
{
    const int c = k.side / 2;
    std::vector<double> out(L.size(), 0.0);
    for (int v = 0; v < k.side; ++v)
        for (int u = 0; u < k.side; ++u)
            out[L.at(wrap(u - c, L.pw()), wrap(v - c, L.ph()))] = k.weights[static_cast<std::size_t>(v) * k.side + u];
    return out;
}

enum class Pairing { product, conjugate };

std::vector<double> spectral(const detail::RealFft2d& fft, const std::vector<double>& a, const std::vector<double>& b,
                             Pairing pairing)
{
    auto fa = fft.forward(a);
    const auto fb = fft.forward(b);
    for (std::size_t i = 0; i < fa.size(); ++i)
        fa[i] *= pairing == Pairing::product ? fb[i] : std::conj(fb[i]);
    auto out = fft.inverse(fa);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (double& v : out)
        v *= scale;
    return out;
}

Image convolve_fft(const Image& f, KernelView k, BoundaryMode mode)
{
    const Lattice L = lattice_for(f.width(), f.height(), k.side, mode);
    const detail::RealFft2d fft(L.pw(), L.ph());
    const auto q = spectral(fft, extend(f, L), kernel_array(k, L), Pairing::product);
    Image out(L.width, L.height);
    for (int y = 0; y < L.height; ++y)
        for (int x = 0; x < L.width; ++x)
            out(x, y) = q[L.at(x + L.pad, y + L.pad)];
    return out;
}

Image correlate_fft(KernelView k, const Image& r, BoundaryMode mode)
{
    const Lattice L = lattice_for(r.width(), r.height(), k.side, mode);
    const detail::RealFft2d fft(L.pw(), L.ph());
    const auto q = spectral(fft, embed(r, L), kernel_array(k, L), Pairing::conjugate);
    // Fold the padded lattice back: adjoint of the replicate extension.
    Image out(L.width, L.height, 0.0);
    for (int j = 0; j < L.ph(); ++j)
        for (int i = 0; i < L.pw(); ++i)
            out(std::clamp(i - L.pad, 0, L.width - 1), std::clamp(j - L.pad, 0, L.height - 1)) += q[L.at(i, j)];
    return out;
}

std::vector<double> correlate_support_fft(const Image& f, const Image& r, int side, BoundaryMode mode)
{
    const Lattice L = lattice_for(f.width(), f.height(), side, mode);
    const detail::RealFft2d fft(L.pw(), L.ph());
    const auto q = spectral(fft, embed(r, L), extend(f, L), Pairing::conjugate);
    const int c = side / 2;
    std::vector<double> g(static_cast<std::size_t>(side) * side);
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u)
            g[static_cast<std::size_t>(v) * side + u] = q[L.at(wrap(u - c, L.pw()), wrap(v - c, L.ph()))];
    return g;
}

Image residual(const Image& f, KernelView k, const Objective& obj)
{
    if (!f.same_shape(obj.blurred))
        throw ArgumentError("image and observation dimensions differ");
    Image r = convolve(f, k, obj.boundary);
    auto rv = r.values();
    const auto bv = obj.blurred.values();
    for (std::size_t i = 0; i < rv.size(); ++i)
        rv[i] -= bv[i];
    return r;
}

double squared_norm(const Image& img)
{
    double acc = 0.0;
    for (double v : img.values())
        acc += v * v;
    return acc;
}

} // namespace

ConvPath select_path(int width, int height, int side)
{
    const long area = static_cast<long>(width) * height;
    return (side * side >= 49 || area >= 64L * 64L) ? ConvPath::fft : ConvPath::direct;
}

Image convolve(const Image& f, KernelView k, BoundaryMode mode, ConvPath path)
{
    check_fits(f.width(), f.height(), k.side);
    return resolve(path, f.width(), f.height(), k.side) == ConvPath::fft ? convolve_fft(f, k, mode)
                                                                          : convolve_direct(f, k, mode);
}

Image correlate(KernelView k, const Image& r, BoundaryMode mode, ConvPath path)
{
    check_fits(r.width(), r.height(), k.side);
    return resolve(path, r.width(), r.height(), k.side) == ConvPath::fft ? correlate_fft(k, r, mode)
                                                                          : correlate_direct(k, r, mode);
}

std::vector<double> correlate_support(const Image& f, const Image& r, int side, BoundaryMode mode, ConvPath path)
{
    check_fits(f.width(), f.height(), side);
    if (!f.same_shape(r))
        throw ArgumentError("correlate_support: image dimensions differ");
    return resolve(path, f.width(), f.height(), side) == ConvPath::fft ? correlate_support_fft(f, r, side, mode)
                                                                        : correlate_support_direct(f, r, side, mode);
}

double data_term(const Image& f, KernelView k, const Objective& obj) { return squared_norm(residual(f, k, obj)); }

Image grad_f_data(const Image& f, KernelView k, const Objective& obj)
{
    Image g = correlate(k, residual(f, k, obj), obj.boundary);
    for (double& v : g.values())
        v *= 2.0;
    return g;
}

std::vector<double> grad_k_data(const Image& f, KernelView k, const Objective& obj)
{
    auto g = correlate_support(f, residual(f, k, obj), k.side, obj.boundary);
    for (double& v : g)
        v *= 2.0;
    return g;
}

DataEvaluation evaluate_data(const Image& f, KernelView k, const Objective& obj)
{
    DataEvaluation out;
    out.residual = residual(f, k, obj);
    out.value = squared_norm(out.residual);
    out.grad_f = correlate(k, out.residual, obj.boundary);
    for (double& v : out.grad_f.values())
        v *= 2.0;
    out.grad_k = correlate_support(f, out.residual, k.side, obj.boundary);
    for (double& v : out.grad_k)
        v *= 2.0;
    return out;
}

} // namespace prida
