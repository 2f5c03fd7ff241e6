#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include <prida/tv.hpp>

using namespace prida;

namespace {

const TvVariant kVariants[] = {TvVariant::anisotropic_p1, TvVariant::isotropic_p2};

// Hand-written forward differences for the reference TV.
double reference_tv(const Image& f, TvVariant variant, double eps)
{
    double acc = 0.0;
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x) {
            const double gx = x + 1 < f.width() ? f(x + 1, y) - f(x, y) : 0.0;
            const double gy = y + 1 < f.height() ? f(x, y + 1) - f(x, y) : 0.0;
            if (variant == TvVariant::isotropic_p2)
                acc += std::sqrt(gx * gx + gy * gy + eps * eps) - eps;
            else
                acc += std::sqrt(gx * gx + eps * eps) - eps + std::sqrt(gy * gy + eps * eps) - eps;
        }
    return acc;
}

} // namespace

TEST_CASE("gradient field edges")
{
    const Image f(3, 2, std::vector<double>{0, 1, 3, 2, 2, 2});
    const auto g = gradient_field(f);
    CHECK(g.gx(0, 0) == 1.0);
    CHECK(g.gx(1, 0) == 2.0);
    CHECK(g.gx(2, 0) == 0.0);
    CHECK(g.gy(0, 0) == 2.0);
    CHECK(g.gy(2, 0) == -1.0);
    CHECK(g.gy(1, 1) == 0.0);
}

TEST_CASE("constant images have zero TV and zero gradient")
{
    for (auto v : kVariants) {
        CHECK(tv_value(Image(5, 4, 0.7), v, 1e-3) == 0.0);
        const Image grad = tv_grad(Image(5, 4, 0.7), v, 1e-3);
        for (double g : grad.values())
            CHECK(g == 0.0);
    }
}

TEST_CASE("hand evaluated anisotropic values")
{
    const double eps = 1e-12;
    CHECK(tv_value(Image(2, 1, std::vector<double>{0, 1}), TvVariant::anisotropic_p1, eps) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(tv_value(Image(2, 2, std::vector<double>{0, 1, 0, 1}), TvVariant::anisotropic_p1, eps) ==
          doctest::Approx(2.0).epsilon(1e-10));
    // One pixel with gx = 3, gy = 4 is 5 isotropically and 7 anisotropically.
    const Image f(2, 2, std::vector<double>{0, 3, 4, 0});
    CHECK(tv_value(f, TvVariant::isotropic_p2, eps) == doctest::Approx(5.0 + 3.0 + 4.0).epsilon(1e-10));
    CHECK(tv_value(f, TvVariant::anisotropic_p1, eps) == doctest::Approx(7.0 + 3.0 + 4.0).epsilon(1e-10));
}

TEST_CASE("values match the reference formula at the default smoothing")
{
    std::mt19937_64 rng(11);
    for (auto v : kVariants) {
        const Image f = oracle::random_image(rng, 7, 5);
        CHECK(tv_value(f, v, 1e-3) == doctest::Approx(reference_tv(f, v, 1e-3)).epsilon(1e-13));
    }
}

TEST_CASE("gradient matches central differences")
{
    std::mt19937_64 rng(12);
    for (auto v : kVariants)
        for (int n = 4; n <= 8; ++n) {
            const Image f = oracle::random_image(rng, n, n);
            const Image g = tv_grad(f, v, 1e-3);
            const std::vector<double> x(f.values().begin(), f.values().end());
            const auto fn = [&](const std::vector<double>& p) { return reference_tv(Image(n, n, p), v, 1e-3); };
            const std::vector<double> ours(g.values().begin(), g.values().end());
            CHECK(oracle::gradient_error(ours, oracle::numeric_gradient(fn, x, 1e-6)) <= 1e-5);
        }
}

TEST_CASE("linear ramp has a divergence-free interior")
{
    Image ramp(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            ramp(x, y) = 0.1 * x + 0.05 * y;
    const Image g = tv_grad(ramp, TvVariant::isotropic_p2, 1e-3);
    for (int y = 1; y < 6; ++y)
        for (int x = 1; x < 6; ++x)
            CHECK(std::abs(g(x, y)) <= 1e-12);
    double boundary = 0.0;
    for (int x = 0; x < 8; ++x)
        boundary += std::abs(g(x, 7));
    CHECK(boundary > 0.1);
}

TEST_CASE("shift invariance")
{
    std::mt19937_64 rng(13);
    const Image f = oracle::random_image(rng, 6, 6);
    Image shifted = f;
    for (double& v : shifted.values())
        v += 0.37;
    for (auto v : kVariants)
        CHECK(tv_value(shifted, v, 1e-3) == doctest::Approx(tv_value(f, v, 1e-3)).epsilon(1e-12));
}

TEST_CASE("anisotropic scaling in the small smoothing limit")
{
    std::mt19937_64 rng(14);
    const Image f = oracle::random_image(rng, 6, 6);
    for (double c : {-2.0, 0.5, 3.0}) {
        Image scaled = f;
        for (double& v : scaled.values())
            v *= c;
        CHECK(oracle::relative_error(tv_value(scaled, TvVariant::anisotropic_p1, 1e-8),
                                     std::abs(c) * tv_value(f, TvVariant::anisotropic_p1, 1e-8)) <= 1e-4);
    }
}

TEST_CASE("curvature bound dominates second differences")
{
    std::mt19937_64 rng(15);
    const double eps = 1e-3;
    const double bound = tv_curvature_bound(eps);
    for (int trial = 0; trial < 20; ++trial) {
        const Image f = oracle::random_image(rng, 6, 6);
        auto d = oracle::random_vector(rng, 36);
        double norm = 0.0;
        for (double v : d)
            norm += v * v;
        for (double& v : d)
            v /= std::sqrt(norm);
        const double h = 1e-4;
        Image up = f, down = f;
        for (std::size_t i = 0; i < 36; ++i) {
            up.values()[i] += h * d[i];
            down.values()[i] -= h * d[i];
        }
        for (auto v : kVariants) {
            const double curv = (tv_value(up, v, eps) - 2.0 * tv_value(f, v, eps) + tv_value(down, v, eps)) / (h * h);
            CHECK(curv <= bound);
        }
    }
}
