#include "prida/robustness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "prida/conv.hpp"
#include "prida/metrics.hpp"
#include "prida/simplex.hpp"

namespace prida {

Image add_noise(const Image& img, const NoiseSpec& spec)
{
    if (spec.kind != NoiseKind::gaussian_pixel)
        throw ArgumentError("add_noise expects pixel noise");
    if (!(spec.sigma >= 0.0))
        throw ArgumentError("noise sigma must be nonnegative");
    Image out = img;
    if (spec.sigma == 0.0)
        return out;
    const auto noise = gaussian_vector(img.size(), spec);
    auto v = out.values();
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] += noise[i];
    return out;
}

std::vector<double> gaussian_vector(std::size_t n, const NoiseSpec& spec)
{
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(n);
    for (double& v : out)
        v = spec.sigma * normal(rng);
    return out;
}

StabilityResult stability_trial(std::span<const double> k0, std::span<const double> g, std::span<const double> alpha,
                                double eta)
{
    if (k0.empty() || g.size() != k0.size() || alpha.size() != k0.size())
        throw ArgumentError("stability_trial: length mismatch");
    const double first = k0.front();
    for (double v : k0)
        if (v != first)
            throw ArgumentError("stability_trial: initial kernel must be uniform");
    if (!(eta > 0.0))
        throw ArgumentError("stability_trial: step must be positive");

    std::vector<double> noisy(g.begin(), g.end());
    double alpha_bar = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        noisy[i] += alpha[i];
        alpha_bar = std::max(alpha_bar, std::abs(alpha[i]));
    }
    const auto clean_step = entropic_step(k0, g, eta, kNoCap);
    const auto noisy_step = entropic_step(k0, noisy, eta, kNoCap);
    return {l1_distance(clean_step, noisy_step), 2.0 * eta * alpha_bar};
}

StabilityResult image_stability_trial(const Image& f, std::span<const double> g, std::span<const double> alpha,
                                      double eta)
{
    if (g.size() != f.size() || alpha.size() != f.size())
        throw ArgumentError("image_stability_trial: length mismatch");
    const auto fv = f.values();
    double gap = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) {
        const double clean = fv[i] - eta * g[i];
        const double noisy = fv[i] - eta * (g[i] + alpha[i]);
        gap += (clean - noisy) * (clean - noisy);
        norm += alpha[i] * alpha[i];
    }
    return {std::sqrt(gap), eta * std::sqrt(norm)};
}

StabilitySuiteReport run_stability_suite(const StabilitySuiteConfig& cfg)
{
    if (cfg.sizes.empty())
        throw ArgumentError("stability suite needs at least one kernel size");
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    StabilitySuiteReport report;
    report.records.reserve(static_cast<std::size_t>(cfg.trials));
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const int s = cfg.sizes[static_cast<std::size_t>(trial) % cfg.sizes.size()];
        const std::vector<double> k0(static_cast<std::size_t>(s), 1.0 / s);
        const double g_scale = std::pow(10.0, 4.0 * uniform(rng) - 2.0);
        const double eta = std::pow(10.0, 4.0 * uniform(rng) - 3.0);
        // eta * alpha_bar lands in (0, 1].
        const double target = 1.0 - uniform(rng);

        std::vector<double> g(static_cast<std::size_t>(s)), alpha(static_cast<std::size_t>(s));
        for (double& v : g)
            v = g_scale * normal(rng);
        double raw_bar = 0.0;
        for (double& v : alpha) {
            v = normal(rng);
            raw_bar = std::max(raw_bar, std::abs(v));
        }
        for (double& v : alpha)
            v *= target / (eta * raw_bar);

        const auto result = stability_trial(k0, g, alpha, eta);
        StabilityRecord rec;
        rec.trial = trial;
        rec.s = s;
        rec.eta = eta;
        rec.alpha_bar = target / eta;
        rec.lhs = result.lhs;
        rec.rhs = result.rhs * cfg.rhs_scale;
        rec.violated = rec.lhs > rec.rhs + cfg.slack;
        if (rec.violated) {
            ++report.violations;
            if (!report.first_violation)
                report.first_violation = rec;
        }
        report.records.push_back(rec);
    }
    return report;
}

std::vector<SweepRow> noise_sweep(const Image& f_true, const Kernel& k_true, const std::vector<double>& sigmas,
                                  const ObjectiveParams& params, const SolverConfig& cfg, std::uint64_t seed)
{
    const Image clean = convolve(f_true, k_true, params.boundary);
    std::vector<SweepRow> rows;
    rows.reserve(sigmas.size());
    for (double sigma : sigmas) {
        const auto start = std::chrono::steady_clock::now();
        const Image b = add_noise(clean, NoiseSpec{NoiseKind::gaussian_pixel, sigma, seed});
        const MultiscaleResult result = solve_multiscale(b, k_true.side(), params, cfg);
        const auto stop = std::chrono::steady_clock::now();

        SweepRow row;
        row.sigma = sigma;
        row.endpoint_error = endpoint_error(result.k, k_true);
        row.psnr = psnr(result.f.clamped(), f_true);
        row.objective = result.final_objective;
        row.iterations = result.total_iterations;
        row.runtime_s = std::chrono::duration<double>(stop - start).count();
        rows.push_back(row);
    }
    return rows;
}

} // namespace prida
