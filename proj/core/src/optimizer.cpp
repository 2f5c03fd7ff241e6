#include "prida/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "prida/simplex.hpp"
#include "prida/tv.hpp"

namespace prida {

namespace {

// Power iteration approaches the top eigenvalue from below.
constexpr double kPowerMargin = 1.02;
constexpr int kMaxBacktracks = 50;

using LinearOp = std::function<std::vector<double>(const std::vector<double>&)>;

double norm2(const std::vector<double>& v)
{
    double acc = 0.0;
    for (double x : v)
        acc += x * x;
    return std::sqrt(acc);
}

double power_norm(const LinearOp& op, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x)
        v = normal(rng);
    double nx = norm2(x);
    for (double& v : x)
        v /= nx;

    double estimate = 0.0;
    for (int it = 0; it < kPowerIterations; ++it) {
        auto y = op(x);
        estimate = norm2(y);
        if (estimate == 0.0)
            return 0.0;
        for (std::size_t i = 0; i < n; ++i)
            x[i] = y[i] / estimate;
    }
    return estimate;
}

std::vector<double> to_vector(const Image& img) { return {img.values().begin(), img.values().end()}; }

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

// Largest diagonal entry of the kernel Gram block: max over offsets of the
// squared norm of the correspondingly shifted image.
double max_shift_energy(const Image& f, int side, BoundaryMode mode)
{
    const int W = f.width(), H = f.height(), c = side / 2;
    const auto src = [mode](int i, int n) {
        if (mode == BoundaryMode::circular)
            return ((i % n) + n) % n;
        return std::clamp(i, 0, n - 1);
    };
    double best = 0.0;
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u) {
            double acc = 0.0;
            for (int y = 0; y < H; ++y) {
                const int sy = src(y - (v - c), H);
                for (int x = 0; x < W; ++x) {
                    const double p = f(src(x - (u - c), W), sy);
                    acc += p * p;
                }
            }
            best = std::max(best, acc);
            if (mode == BoundaryMode::circular)
                return best;
        }
    return best;
}

enum class KernelRule { entropic, projected };

void check_finite(const IterateState& state, std::span<const double> values, const char* what)
{
    for (double v : values)
        if (!std::isfinite(v))
            throw NumericalFailure(std::string("non-finite ") + what + " at iteration " + std::to_string(state.t),
                                   state.trace);
}

struct StepPlan {
    double eta_f = 0.0;
    std::vector<double> eta_k;
};

StepPlan plan_steps(const IterateState& state, std::span<const double> g_k, const SolverConfig& cfg,
                    const CurvatureEstimate& curvature, KernelRule rule)
{
    StepPlan plan;
    const std::size_t s = state.k.size();
    if (cfg.step_mode == StepMode::fixed) {
        plan.eta_f = cfg.fixed_eta;
        plan.eta_k.assign(s, cfg.fixed_eta);
        return plan;
    }
    const double lf = cfg.lipschitz ? *cfg.lipschitz : curvature.f_block;
    const double lk =
        cfg.lipschitz ? *cfg.lipschitz : (rule == KernelRule::entropic ? curvature.k_block_l1 : curvature.k_block);
    plan.eta_f = lf > 0.0 ? 1.0 / lf : 0.0;
    if (!(lk > 0.0)) {
        // Zero kernel curvature means f = 0, hence g_k = 0 as well.
        plan.eta_k.assign(s, 0.0);
    } else if (rule == KernelRule::entropic) {
        plan.eta_k = adaptive_kernel_steps(state.k.weights(), g_k, cfg.alpha, lk);
    } else {
        plan.eta_k.assign(s, 1.0 / lk);
    }
    return plan;
}

void advance(IterateState& state, const Objective& obj, const SolverConfig& cfg, const CurvatureEstimate& curvature,
             KernelRule rule, bool update_image)
{
    const auto eval = evaluate_data(state.f, state.k, obj);
    Image g_f = eval.grad_f;
    if (update_image && obj.lambda > 0.0) {
        const Image tv = tv_grad(state.f, obj.tv_variant, obj.tv_epsilon);
        auto gv = g_f.values();
        const auto tvv = tv.values();
        for (std::size_t i = 0; i < gv.size(); ++i)
            gv[i] += obj.lambda * tvv[i];
    }
    check_finite(state, g_f.values(), "image gradient");
    check_finite(state, eval.grad_k, "kernel gradient");

    const StepPlan plan = plan_steps(state, eval.grad_k, cfg, curvature, rule);
    const auto k_now = state.k.weights();
    const std::size_t s = k_now.size();

    double scale = 1.0;
    Image f_next = state.f;
    std::vector<double> k_next(k_now.begin(), k_now.end());
    double objective_next = state.objective;
    bool accepted = false;
    std::vector<double> eta_k(s);

    for (int attempt = 0; attempt <= (cfg.descent_guard ? kMaxBacktracks : 0); ++attempt) {
        f_next = state.f;
        if (update_image) {
            auto fv = f_next.values();
            const auto gv = g_f.values();
            for (std::size_t i = 0; i < fv.size(); ++i)
                fv[i] -= scale * plan.eta_f * gv[i];
        }
        for (std::size_t i = 0; i < s; ++i)
            eta_k[i] = scale * plan.eta_k[i];

        if (rule == KernelRule::entropic) {
            k_next = entropic_step(k_now, eval.grad_k, eta_k, cfg.big_m);
        } else {
            std::vector<double> moved(s);
            for (std::size_t i = 0; i < s; ++i)
                moved[i] = k_now[i] - eta_k[i] * eval.grad_k[i];
            k_next = project_simplex(moved);
        }

        objective_next = objective_value(f_next, KernelView(state.k.side(), k_next), obj);
        if (!cfg.descent_guard) {
            if (!std::isfinite(objective_next))
                throw NumericalFailure("objective became non-finite at iteration " + std::to_string(state.t),
                                       state.trace);
            accepted = true;
            break;
        }
        if (std::isfinite(objective_next) && objective_next <= state.objective) {
            accepted = true;
            break;
        }
        scale *= 0.5;
    }

    TraceRecord rec;
    rec.t = state.t + 1;
    if (accepted) {
        double move = 0.0;
        const auto fa = state.f.values();
        const auto fb = f_next.values();
        for (std::size_t i = 0; i < fa.size(); ++i)
            move += (fb[i] - fa[i]) * (fb[i] - fa[i]);
        for (std::size_t i = 0; i < s; ++i)
            move += (k_next[i] - k_now[i]) * (k_next[i] - k_now[i]);
        rec.objective = objective_next;
        rec.eta_f = update_image ? scale * plan.eta_f : 0.0;
        rec.eta_k_max = eta_k.empty() ? 0.0 : *std::max_element(eta_k.begin(), eta_k.end());
        rec.move_l2 = std::sqrt(move);
        rec.kl_step = kl(k_next, k_now);
        state.f = std::move(f_next);
        state.k = Kernel(state.k.side(), std::move(k_next));
        state.objective = objective_next;
    } else {
        // No trial step decreased the objective; stay put.
        rec.objective = state.objective;
    }
    state.t += 1;
    state.trace.push_back(rec);
}

void require_positive(const Kernel& k)
{
    if (!(k.min_weight() > 0.0))
        throw ArgumentError("entropic updates require a strictly positive kernel");
}

IterateState run(IterateState state, const Objective& obj, const SolverConfig& cfg, bool update_image)
{
    const KernelRule rule = cfg.algorithm == Algorithm::prida ? KernelRule::entropic : KernelRule::projected;
    if (rule == KernelRule::entropic)
        require_positive(state.k);
    const double tol = cfg.tol_move >= 0.0 ? cfg.tol_move : default_tol_move(state.f.size(), state.k.size());

    CurvatureEstimate curvature;
    if (!cfg.lipschitz)
        curvature = estimate_lipschitz(state.f, state.k, obj, cfg.seed);
    state.trace.reserve(state.trace.size() + static_cast<std::size_t>(cfg.max_iters));
    for (int it = 0; it < cfg.max_iters; ++it) {
        if (!cfg.lipschitz && cfg.relip_every > 0 && it > 0 && it % cfg.relip_every == 0)
            curvature = estimate_lipschitz(state.f, state.k, obj, cfg.seed);
        advance(state, obj, cfg, curvature, rule, update_image);
        if (state.trace.back().move_l2 < tol)
            break;
    }
    return state;
}

} // namespace

CurvatureEstimate estimate_lipschitz(const Image& f, const Kernel& k, const Objective& obj, std::uint64_t seed)
{
    obj.validate();
    const int W = f.width(), H = f.height(), side = k.side();
    const BoundaryMode mode = obj.boundary;

    const LinearOp image_block = [&](const std::vector<double>& x) {
        const Image xi(W, H, x);
        return to_vector(correlate(k, convolve(xi, k, mode), mode));
    };
    const LinearOp kernel_block = [&](const std::vector<double>& x) {
        const Image fx = convolve(f, KernelView(side, x), mode);
        return correlate_support(f, fx, side, mode);
    };

    CurvatureEstimate out;
    out.f_block = 2.0 * kPowerMargin * power_norm(image_block, f.size(), seed) +
                  obj.lambda * tv_curvature_bound(obj.tv_epsilon);
    out.k_block = 2.0 * kPowerMargin * power_norm(kernel_block, k.size(), seed + 1);
    out.k_block_l1 = 2.0 * max_shift_energy(f, side, mode);

    const Image r = [&] {
        Image res = convolve(f, k, mode);
        auto rv = res.values();
        const auto bv = obj.blurred.values();
        for (std::size_t i = 0; i < rv.size(); ++i)
            rv[i] -= bv[i];
        return res;
    }();
    const double spread = mode == BoundaryMode::circular ? 1.0 : std::sqrt(1.0 + side / 2);
    out.coupling = 2.0 * std::sqrt(static_cast<double>(k.size())) * spread * norm2(to_vector(r));
    return out;
}

double objective_value(const Image& f, KernelView k, const Objective& obj)
{
    double value = data_term(f, k, obj);
    if (obj.lambda > 0.0)
        value += obj.lambda * tv_value(f, obj.tv_variant, obj.tv_epsilon);
    return value;
}

IterateState initial_state(Image f0, Kernel k0, const Objective& obj)
{
    obj.validate();
    if (!f0.same_shape(obj.blurred))
        throw ArgumentError("initial image and observation dimensions differ");
    IterateState state;
    state.objective = objective_value(f0, k0, obj);
    state.f = std::move(f0);
    state.k = std::move(k0);
    return state;
}

std::vector<double> adaptive_kernel_steps(std::span<const double> k, std::span<const double> g_k, double alpha,
                                          double lipschitz)
{
    const double cap = 1.0 / lipschitz;
    const double g_inf = max_abs(g_k);
    std::vector<double> eta(k.size(), cap);
    if (g_inf == 0.0)
        return eta;
    const double k_inf = max_abs(k);
    for (std::size_t i = 0; i < k.size(); ++i)
        eta[i] = std::min(alpha * k_inf / (k[i] * g_inf), cap);
    return eta;
}

IterateState prida_step(const IterateState& state, const Objective& obj, const SolverConfig& cfg,
                        const CurvatureEstimate& curvature)
{
    require_positive(state.k);
    IterateState next = state;
    advance(next, obj, cfg, curvature, KernelRule::entropic, true);
    return next;
}

IterateState prida_step(const IterateState& state, const Objective& obj, const SolverConfig& cfg)
{
    const CurvatureEstimate curvature = cfg.lipschitz ? CurvatureEstimate{} : estimate_lipschitz(state.f, state.k, obj, cfg.seed);
    return prida_step(state, obj, cfg, curvature);
}

IterateState pgd_step(const IterateState& state, const Objective& obj, const SolverConfig& cfg,
                      const CurvatureEstimate& curvature)
{
    IterateState next = state;
    advance(next, obj, cfg, curvature, KernelRule::projected, true);
    return next;
}

IterateState pgd_step(const IterateState& state, const Objective& obj, const SolverConfig& cfg)
{
    const CurvatureEstimate curvature = cfg.lipschitz ? CurvatureEstimate{} : estimate_lipschitz(state.f, state.k, obj, cfg.seed);
    return pgd_step(state, obj, cfg, curvature);
}

IterateState solve(Image f0, Kernel k0, const Objective& obj, const SolverConfig& cfg)
{
    cfg.validate();
    return run(initial_state(std::move(f0), std::move(k0), obj), obj, cfg, true);
}

IterateState solve_kernel_only(const Image& f, Kernel k0, const Objective& obj, const SolverConfig& cfg)
{
    cfg.validate();
    return run(initial_state(f, std::move(k0), obj), obj, cfg, false);
}

double default_tol_move(std::size_t pixels, std::size_t kernel_entries)
{
    return 1e-7 * std::sqrt(static_cast<double>(pixels + kernel_entries));
}

} // namespace prida
