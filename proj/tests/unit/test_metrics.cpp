#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include <prida/metrics.hpp>
#include <prida/robustness.hpp>
#include <prida/synthetic.hpp>

using namespace prida;

namespace {

// Embeds k into a larger odd support, offset by (dx, dy) from the center.
Kernel embed(const Kernel& k, int side, int dx, int dy)
{
    std::vector<double> w(static_cast<std::size_t>(side) * side, 0.0);
    const int off = (side - k.side()) / 2;
    for (int v = 0; v < k.side(); ++v)
        for (int u = 0; u < k.side(); ++u)
            w[static_cast<std::size_t>(v + off + dy) * side + (u + off + dx)] = k(u, v);
    return Kernel(side, w);
}

} // namespace

TEST_CASE("endpoint error hand values")
{
    const Kernel k = line_kernel(5, 3, 20.0);
    CHECK(endpoint_error(k, k) == 0.0);
    const double ninth = 1.0 / 9.0;
    CHECK(endpoint_error(delta_kernel(3), uniform_kernel(3)) ==
          doctest::Approx(ninth * ((1 - ninth) * (1 - ninth) + 8 * ninth * ninth)).epsilon(1e-14));
}

TEST_CASE("endpoint error ignores shifts")
{
    const Kernel k = line_kernel(5, 3, 70.0);
    CHECK(endpoint_error(embed(k, 9, 1, 0), embed(k, 9, 0, 0)) == doctest::Approx(0.0).scale(1.0));
    CHECK(endpoint_error(embed(k, 9, -2, 1), embed(k, 9, 0, 0)) <= 1e-30);
    const Kernel other = gaussian_kernel(5, 1.0);
    CHECK(endpoint_error(embed(k, 9, 2, 0), embed(other, 9, 0, -1)) ==
          doctest::Approx(endpoint_error(embed(k, 9, 0, 0), embed(other, 9, 0, 0))).epsilon(1e-14));
}

TEST_CASE("endpoint error is symmetric and handles unequal sides")
{
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 5; ++trial) {
        const Kernel a(5, oracle::random_simplex(rng, 25, 2.0));
        const Kernel b(7, oracle::random_simplex(rng, 49, 2.0));
        CHECK(endpoint_error(a, b) == doctest::Approx(endpoint_error(b, a)).epsilon(1e-14));
        CHECK(endpoint_error(a, b) >= 0.0);
    }
    // A centered 3x3 delta against a 5x5 delta: identical after padding.
    CHECK(endpoint_error(delta_kernel(3), delta_kernel(5)) == 0.0);
}

TEST_CASE("psnr values")
{
    const Image a(4, 4, 0.3);
    CHECK(psnr(a, a) == kPsnrIdentical);
    CHECK(psnr(Image(4, 4, 0.4), a) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(psnr(Image(4, 4, 1.3), a) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(psnr(Image(4, 3), a), ArgumentError);
}

TEST_CASE("psnr falls as noise grows")
{
    const Image f = synthetic_scene(32, 32, 72);
    double prev = kPsnrIdentical + 1;
    for (double sigma : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        const double p = psnr(add_noise(f, NoiseSpec{NoiseKind::gaussian_pixel, sigma, 3}), f);
        CHECK(p < prev);
        prev = p;
    }
}
