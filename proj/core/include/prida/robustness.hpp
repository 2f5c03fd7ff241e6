#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prida/pyramid.hpp"
#include "prida/types.hpp"

namespace prida {

enum class NoiseKind { gaussian_pixel, gaussian_gradient };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian_pixel;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// img + N(0, sigma^2) per pixel, not clamped. Same spec, same realization.
Image add_noise(const Image& img, const NoiseSpec& spec);

/// i.i.d. N(0, sigma^2) vector for gradient perturbations.
std::vector<double> gaussian_vector(std::size_t n, const NoiseSpec& spec);

struct StabilityResult {
    double lhs = 0.0; ///< ||k_g - k_h||_1 after one entropic step from uniform
    double rhs = 0.0; ///< 2 eta max|alpha|
};

/// One exponentiated step from a uniform kernel with the clean gradient g and
/// the perturbed gradient g + alpha (scalar step, no multiplier cap).
StabilityResult stability_trial(std::span<const double> k0, std::span<const double> g,
                                std::span<const double> alpha, double eta);

/// Image analog: one unconstrained gradient step from f with g and with
/// g + alpha. lhs = ||f_g - f_h||_2, rhs = eta ||alpha||_2.
StabilityResult image_stability_trial(const Image& f, std::span<const double> g, std::span<const double> alpha,
                                      double eta);

struct StabilitySuiteConfig {
    int trials = 10000;
    std::vector<int> sizes{4, 169, 729};
    std::uint64_t seed = 1;
    // Multiplies the bound before comparison; values below 1 inject faults.
    double rhs_scale = 1.0;
    double slack = 1e-12;
};

struct StabilityRecord {
    int trial = 0;
    int s = 0;
    double eta = 0.0;
    double alpha_bar = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool violated = false;
};

struct StabilitySuiteReport {
    std::vector<StabilityRecord> records;
    int violations = 0;
    std::optional<StabilityRecord> first_violation;
};

/// Randomized trials with eta * max|alpha| drawn from (0, 1].
StabilitySuiteReport run_stability_suite(const StabilitySuiteConfig& cfg);

struct SweepRow {
    double sigma = 0.0;
    double endpoint_error = 0.0;
    double psnr = 0.0;
    double objective = 0.0;
    int iterations = 0;
    double runtime_s = 0.0;
};

/// For each sigma: b = f_true * k_true + noise, blind multiscale solve,
/// kernel endpoint error and PSNR of the clamped image. Every sigma reuses
/// the same standard-normal draw, scaled.
std::vector<SweepRow> noise_sweep(const Image& f_true, const Kernel& k_true, const std::vector<double>& sigmas,
                                  const ObjectiveParams& params, const SolverConfig& cfg, std::uint64_t seed);

} // namespace prida
