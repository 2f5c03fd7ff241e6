#pragma once

#include <cstdint>
#include <stdexcept>

#include "prida/conv.hpp"
#include "prida/types.hpp"

namespace prida {

/// Raised when the objective stops being finite. Carries the trace so far.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, Trace trace) : std::runtime_error(what), trace_(std::move(trace)) {}
    const Trace& trace() const { return trace_; }

private:
    Trace trace_;
};

/// Curvature bounds of the objective at a point (f, k).
///
/// f_block and k_block bound the spectral norms of the two diagonal Hessian
/// blocks (power iteration plus the TV smoothing bound on the image side).
/// k_block_l1 is the largest absolute entry of the kernel block, i.e. its
/// smoothness constant with respect to the l1 norm, which is the constant the
/// entropic step needs. coupling bounds the residual-weighted cross term, so
/// joint() bounds the curvature along any unit direction in (f, k).
struct CurvatureEstimate {
    double f_block = 0.0;
    double k_block = 0.0;
    double k_block_l1 = 0.0;
    double coupling = 0.0;

    double joint() const { return f_block + k_block + coupling; }
};

inline constexpr int kPowerIterations = 30;

CurvatureEstimate estimate_lipschitz(const Image& f, const Kernel& k, const Objective& obj,
                                     std::uint64_t seed = 0x5eed);

/// L(f,k) = ||f*k - b||^2 + lambda * TV(f).
double objective_value(const Image& f, KernelView k, const Objective& obj);

struct IterateState {
    Image f;
    Kernel k;
    int t = 0;
    double objective = 0.0;
    Trace trace;
};

IterateState initial_state(Image f0, Kernel k0, const Objective& obj);

/// Step sizes actually used for one update.
struct StepSizes {
    double eta_f = 0.0;
    std::vector<double> eta_k;
};

/// Per-coordinate kernel steps min(alpha ||k||_inf / (k_i ||g_k||_inf), 1/L),
/// or 1/L everywhere when g_k vanishes.
std::vector<double> adaptive_kernel_steps(std::span<const double> k, std::span<const double> g_k, double alpha,
                                          double lipschitz);

/// Entropic kernel update on the simplex; the image takes a plain gradient step.
IterateState prida_step(const IterateState& state, const Objective& obj, const SolverConfig& cfg,
                        const CurvatureEstimate& curvature);
IterateState prida_step(const IterateState& state, const Objective& obj, const SolverConfig& cfg);

/// Projected-gradient baseline: kernel <- project(k - g_k / L).
IterateState pgd_step(const IterateState& state, const Objective& obj, const SolverConfig& cfg,
                      const CurvatureEstimate& curvature);
IterateState pgd_step(const IterateState& state, const Objective& obj, const SolverConfig& cfg);

/// Runs the selected algorithm until max_iters or until an update moves the
/// iterate by less than tol_move (l2 over image and kernel together).
IterateState solve(Image f0, Kernel k0, const Objective& obj, const SolverConfig& cfg);

/// Same loop with the image frozen; only the kernel is optimized.
IterateState solve_kernel_only(const Image& f, Kernel k0, const Objective& obj, const SolverConfig& cfg);

double default_tol_move(std::size_t pixels, std::size_t kernel_entries);

} // namespace prida
