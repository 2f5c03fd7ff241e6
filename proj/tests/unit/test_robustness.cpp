#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include <prida/robustness.hpp>
#include <prida/simplex.hpp>
#include <prida/synthetic.hpp>

using namespace prida;

TEST_CASE("zero sigma is the identity")
{
    const Image f = synthetic_scene(16, 16, 81);
    const Image g = add_noise(f, NoiseSpec{NoiseKind::gaussian_pixel, 0.0, 5});
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(g.values()[i] == f.values()[i]);
}

TEST_CASE("noise moments on a 255x255 image")
{
    const Image clean(255, 255, 0.5);
    for (double sigma : {0.1, 9.0 / 255.0}) {
        const Image noisy = add_noise(clean, NoiseSpec{NoiseKind::gaussian_pixel, sigma, 17});
        double mean = 0.0;
        for (std::size_t i = 0; i < clean.size(); ++i)
            mean += noisy.values()[i] - clean.values()[i];
        mean /= static_cast<double>(clean.size());
        double var = 0.0;
        for (std::size_t i = 0; i < clean.size(); ++i) {
            const double d = noisy.values()[i] - clean.values()[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(clean.size() - 1);
        CHECK(std::abs(mean) <= 3.0 * sigma / 255.0);
        CHECK(std::sqrt(var) == doctest::Approx(sigma).epsilon(0.05));
    }
}

TEST_CASE("noise is not clamped and is reproducible")
{
    const Image bright(32, 32, 0.99);
    const NoiseSpec spec{NoiseKind::gaussian_pixel, 0.2, 23};
    const Image a = add_noise(bright, spec), b = add_noise(bright, spec);
    bool above = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.values()[i] == b.values()[i]);
        above = above || a.values()[i] > 1.0;
    }
    CHECK(above);
    const Image c = add_noise(bright, NoiseSpec{NoiseKind::gaussian_pixel, 0.2, 24});
    CHECK(c.values()[0] != a.values()[0]);
    CHECK_THROWS_AS(add_noise(bright, NoiseSpec{NoiseKind::gaussian_gradient, 0.1, 1}), ArgumentError);
}

TEST_CASE("stability trial trivial and two-coordinate cases")
{
    const std::vector<double> k0(2, 0.5);
    const auto zero = stability_trial(k0, std::vector<double>{0.3, -0.1}, std::vector<double>(2, 0.0), 0.1);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);

    // g = 0, alpha = (a, 0): the perturbed point is (e^{-x}, 1)/(1 + e^{-x})
    // with x = eta*a, so the l1 gap is 2 |1/2 - 1/(1+e^x)| = |tanh(x/2)|.
    for (double a : {0.5, 3.0, -7.0}) {
        const double eta = 0.01;
        const auto r = stability_trial(k0, std::vector<double>(2, 0.0), std::vector<double>{a, 0.0}, eta);
        CHECK(r.lhs == doctest::Approx(std::abs(std::tanh(eta * a / 2.0))).epsilon(1e-12));
        CHECK(r.rhs == doctest::Approx(2.0 * eta * std::abs(a)));
        CHECK(r.lhs <= r.rhs);
    }

    CHECK_THROWS_AS(stability_trial(std::vector<double>{0.6, 0.4}, std::vector<double>(2, 0.0),
                                    std::vector<double>(2, 0.0), 0.1),
                    ArgumentError);
}

TEST_CASE("stability suite has no violations and is reproducible")
{
    StabilitySuiteConfig cfg;
    cfg.trials = 600;
    const auto a = run_stability_suite(cfg);
    CHECK(a.violations == 0);
    CHECK(a.records.size() == 600);
    for (const auto& r : a.records) {
        CHECK(r.eta * r.alpha_bar <= 1.0 + 1e-12);
        CHECK(r.eta * r.alpha_bar > 0.0);
    }
    const auto b = run_stability_suite(cfg);
    for (std::size_t i = 0; i < a.records.size(); ++i)
        REQUIRE(a.records[i].lhs == b.records[i].lhs);
}

TEST_CASE("shrinking the bound exposes violations")
{
    // One step moves at most tanh(eta*alpha_bar) <= eta*alpha_bar, so the
    // bound has a factor of two to spare and halving it is still safe.
    StabilitySuiteConfig cfg;
    cfg.trials = 400;
    cfg.rhs_scale = 0.5;
    CHECK(run_stability_suite(cfg).violations == 0);

    cfg.rhs_scale = 0.25;
    const auto r = run_stability_suite(cfg);
    CHECK(r.violations > 0);
    REQUIRE(r.first_violation.has_value());
    CHECK(r.first_violation->lhs > r.first_violation->rhs);
}

TEST_CASE("image step moves by eta times the perturbation")
{
    std::mt19937_64 rng(82);
    const Image f = oracle::random_image(rng, 8, 8);
    const auto g = oracle::random_vector(rng, 64);
    const auto alpha = gaussian_vector(64, NoiseSpec{NoiseKind::gaussian_gradient, 0.3, 5});
    // eta a power of two keeps every product exact.
    const auto r = image_stability_trial(f, g, alpha, 0.125);
    double norm = 0.0;
    for (double a : alpha)
        norm += a * a;
    CHECK(r.rhs == 0.125 * std::sqrt(norm));
    CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-14));
}

TEST_CASE("noise sweep rows")
{
    const Image f = synthetic_scene(24, 24, 83);
    ObjectiveParams params;
    params.lambda = 1e-2;
    SolverConfig cfg;
    cfg.max_iters = 5000;
    const auto rows = noise_sweep(f, delta_kernel(3), {0.0}, params, cfg, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].endpoint_error <= 1e-3);
    CHECK(rows[0].iterations > 0);

    const auto three = noise_sweep(f, delta_kernel(3), {0.0, 0.01, 0.02}, params, cfg, 1);
    CHECK(three.size() == 3);
    CHECK(three[1].sigma == 0.01);
}
