#include "prida/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prida {

Image::Image(int width, int height, double fill)
    : Image(width, height,
            std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                    static_cast<std::size_t>(std::max(height, 0)),
                                fill))
{
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data))
{
    if (width <= 0 || height <= 0)
        throw ArgumentError("image dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw ArgumentError("image data length does not match width*height");
}

Image Image::clamped() const
{
    Image out = *this;
    for (double& v : out.data_)
        v = std::clamp(v, 0.0, 1.0);
    return out;
}

bool on_simplex(std::span<const double> w, double tol)
{
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v))
            return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

Kernel::Kernel(int side, std::vector<double> weights) : side_(side), weights_(std::move(weights))
{
    if (side <= 0 || side % 2 == 0)
        throw ArgumentError("kernel side must be a positive odd integer, got " + std::to_string(side));
    if (weights_.size() != static_cast<std::size_t>(side) * static_cast<std::size_t>(side))
        throw ArgumentError("kernel weight count does not match side*side");
    if (!on_simplex(weights_))
        throw ArgumentError("kernel weights are not on the probability simplex");
}

double Kernel::max_weight() const { return *std::max_element(weights_.begin(), weights_.end()); }
double Kernel::min_weight() const { return *std::min_element(weights_.begin(), weights_.end()); }

Kernel uniform_kernel(int side)
{
    if (side <= 0 || side % 2 == 0)
        throw ArgumentError("uniform kernel requires an odd side, got " + std::to_string(side));
    const std::size_t s = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
    return Kernel(side, std::vector<double>(s, 1.0 / static_cast<double>(s)));
}

Kernel delta_kernel(int side)
{
    if (side <= 0 || side % 2 == 0)
        throw ArgumentError("delta kernel requires an odd side");
    std::vector<double> w(static_cast<std::size_t>(side) * side, 0.0);
    w[static_cast<std::size_t>(side / 2) * side + side / 2] = 1.0;
    return Kernel(side, std::move(w));
}

Kernel normalized_kernel(int side, std::vector<double> weights)
{
    double total = 0.0;
    for (double v : weights) {
        if (v < 0.0 || !std::isfinite(v))
            throw ArgumentError("kernel weights must be finite and nonnegative");
        total += v;
    }
    if (!(total > 0.0))
        throw ArgumentError("kernel weights sum to zero");
    for (double& v : weights)
        v /= total;
    return Kernel(side, std::move(weights));
}

void Objective::validate() const
{
    if (blurred.empty())
        throw ArgumentError("objective has no observation");
    if (!(lambda >= 0.0))
        throw ArgumentError("lambda must be nonnegative");
    if (!(tv_epsilon > 0.0))
        throw ArgumentError("tv epsilon must be positive");
}

void SolverConfig::validate() const
{
    if (max_iters < 0)
        throw ArgumentError("max_iters must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ArgumentError("alpha must lie in (0,1)");
    if (!(big_m >= 1.0))
        throw ArgumentError("big M must be at least 1");
    if (lipschitz && !(*lipschitz > 0.0))
        throw ArgumentError("lipschitz estimate must be positive");
    if (step_mode == StepMode::fixed && !(fixed_eta > 0.0))
        throw ArgumentError("fixed step must be positive");
    if (relip_every < 0)
        throw ArgumentError("relip_every must be nonnegative");
}

std::string to_string(TvVariant v)
{
    return v == TvVariant::anisotropic_p1 ? "anisotropic" : "isotropic";
}

std::string to_string(BoundaryMode m) { return m == BoundaryMode::circular ? "circular" : "replicate"; }

std::string to_string(Algorithm a) { return a == Algorithm::prida ? "prida" : "pgd"; }

TvVariant parse_tv_variant(const std::string& s)
{
    if (s == "anisotropic" || s == "anisotropic_p1" || s == "p1")
        return TvVariant::anisotropic_p1;
    if (s == "isotropic" || s == "isotropic_p2" || s == "p2")
        return TvVariant::isotropic_p2;
    throw ArgumentError("unknown TV variant '" + s + "'");
}

BoundaryMode parse_boundary(const std::string& s)
{
    if (s == "circular")
        return BoundaryMode::circular;
    if (s == "replicate")
        return BoundaryMode::replicate;
    throw ArgumentError("unknown boundary mode '" + s + "'");
}

Algorithm parse_algorithm(const std::string& s)
{
    if (s == "prida")
        return Algorithm::prida;
    if (s == "pgd")
        return Algorithm::pgd;
    throw ArgumentError("unknown algorithm '" + s + "'");
}

} // namespace prida
