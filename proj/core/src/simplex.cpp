#include "prida/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "prida/types.hpp"

namespace prida {

namespace {

// exp() stays finite and nonzero comfortably inside this band.
constexpr double kSafeExponent = 700.0;

void check_sizes(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw ArgumentError(std::string(what) + ": length mismatch");
}

void normalize_in_place(std::vector<double>& w)
{
    double total = 0.0;
    for (double v : w)
        total += v;
    for (double& v : w)
        v /= total;
}

} // namespace

double kl(std::span<const double> x, std::span<const double> y)
{
    check_sizes(x.size(), y.size(), "kl");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0)
            continue;
        if (y[i] == 0.0)
            return std::numeric_limits<double>::infinity();
        acc += x[i] * std::log(x[i] / y[i]);
    }
    return std::max(acc, 0.0);
}

std::vector<double> entropic_step(std::span<const double> k, std::span<const double> g, std::span<const double> eta,
                                  double big_m)
{
    check_sizes(k.size(), g.size(), "entropic_step");
    check_sizes(k.size(), eta.size(), "entropic_step");
    if (!(big_m > 0.0))
        throw ArgumentError("entropic_step: big M must be positive");
    const double log_cap = std::log(big_m);

    std::vector<double> exponent(k.size());
    bool safe = true;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!std::isfinite(g[i]) || !std::isfinite(eta[i]))
            throw ArgumentError("entropic_step: non-finite gradient or step");
        if (!(k[i] > 0.0))
            throw ArgumentError("entropic_step: iterate must be strictly positive");
        exponent[i] = std::min(-eta[i] * g[i], log_cap);
        safe = safe && std::abs(exponent[i]) <= kSafeExponent;
    }

    std::vector<double> out(k.size());
    if (safe) {
        for (std::size_t i = 0; i < k.size(); ++i) {
            out[i] = k[i] * std::exp(exponent[i]);
            // A tiny coordinate can still underflow after the product.
            safe = safe && out[i] >= std::numeric_limits<double>::min();
        }
    }
    if (!safe) {
        // Common rescaling cancels in the normalization.
        for (std::size_t i = 0; i < k.size(); ++i)
            exponent[i] += std::log(k[i]);
        const double top = *std::max_element(exponent.begin(), exponent.end());
        for (std::size_t i = 0; i < k.size(); ++i)
            out[i] = std::max(std::exp(exponent[i] - top), std::numeric_limits<double>::min());
    }
    normalize_in_place(out);
    return out;
}

std::vector<double> entropic_step(std::span<const double> k, std::span<const double> g, double eta, double big_m)
{
    const std::vector<double> steps(k.size(), eta);
    return entropic_step(k, g, steps, big_m);
}

std::vector<double> kl_prox(std::span<const double> k, std::span<const double> z)
{
    check_sizes(k.size(), z.size(), "kl_prox");
    std::vector<double> logits(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!std::isfinite(z[i]))
            throw ArgumentError("kl_prox: non-finite tilt");
        if (!(k[i] > 0.0))
            throw ArgumentError("kl_prox: center must be strictly positive");
        logits[i] = std::log(k[i]) - z[i];
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double& v : logits) {
        v = std::exp(v - top);
        total += v;
    }
    for (double& v : logits)
        v /= total;
    return logits;
}

double simplex_threshold(std::span<const double> v)
{
    if (v.empty())
        throw ArgumentError("project_simplex: empty vector");
    std::vector<double> sorted(v.begin(), v.end());
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumulative += sorted[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0)
            tau = candidate;
    }
    return tau;
}

std::vector<double> project_simplex(std::span<const double> v)
{
    for (double x : v)
        if (!std::isfinite(x))
            throw ArgumentError("project_simplex: non-finite input");
    const double tau = simplex_threshold(v);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = std::max(v[i] - tau, 0.0);
    return out;
}

double three_point_gap(std::span<const double> z, std::span<const double> x0, std::span<const double> y)
{
    check_sizes(z.size(), x0.size(), "three_point_gap");
    check_sizes(z.size(), y.size(), "three_point_gap");
    const auto x_star = kl_prox(x0, z);
    const auto dot = [&](std::span<const double> a) { return std::inner_product(z.begin(), z.end(), a.begin(), 0.0); };
    const double lhs = dot(y) + kl(y, x0);
    const double rhs = dot(x_star) + kl(x_star, x0) + kl(y, x_star);
    return lhs - rhs;
}

double l1_distance(std::span<const double> a, std::span<const double> b)
{
    check_sizes(a.size(), b.size(), "l1_distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::abs(a[i] - b[i]);
    return acc;
}

double l2_distance(std::span<const double> a, std::span<const double> b)
{
    check_sizes(a.size(), b.size(), "l2_distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

} // namespace prida
