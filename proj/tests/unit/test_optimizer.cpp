#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include <prida/optimizer.hpp>
#include <prida/robustness.hpp>
#include <prida/simplex.hpp>
#include <prida/synthetic.hpp>
#include <prida/tv.hpp>

using namespace prida;

namespace {

Objective make_objective(Image b, double lambda, BoundaryMode mode = BoundaryMode::circular)
{
    Objective obj;
    obj.blurred = std::move(b);
    obj.lambda = lambda;
    obj.boundary = mode;
    return obj;
}

struct SmallInstance {
    Image f_true;
    Kernel k_true;
    Objective obj;
};

SmallInstance small_instance(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    SmallInstance inst;
    inst.f_true = oracle::random_image(rng, 8, 8);
    inst.k_true = Kernel(3, oracle::random_simplex(rng, 9));
    Image b = convolve(inst.f_true, inst.k_true, BoundaryMode::circular);
    b = add_noise(b, NoiseSpec{NoiseKind::gaussian_pixel, 0.02, seed});
    inst.obj = make_objective(std::move(b), 6e-4);
    return inst;
}

} // namespace

TEST_CASE("curvature of the identity blur without regularization")
{
    std::mt19937_64 rng(31);
    const Image f = oracle::random_image(rng, 12, 12);
    const auto c = estimate_lipschitz(f, uniform_kernel(1), make_objective(oracle::random_image(rng, 12, 12), 0.0));
    CHECK(c.f_block == doctest::Approx(2.0).epsilon(0.05));
    CHECK(c.f_block >= 2.0);
}

TEST_CASE("zero image has no kernel curvature")
{
    std::mt19937_64 rng(32);
    const Kernel k(3, oracle::random_simplex(rng, 9));
    const auto obj = make_objective(oracle::random_image(rng, 8, 8), 6e-4);
    const auto c = estimate_lipschitz(Image(8, 8, 0.0), k, obj);
    CHECK(c.k_block == 0.0);
    CHECK(c.k_block_l1 == 0.0);
    CHECK(c.f_block > 0.0);
    CHECK(c.joint() == doctest::Approx(c.f_block + c.coupling));
}

TEST_CASE("joint bound dominates directional second differences")
{
    std::mt19937_64 rng(33);
    for (auto mode : {BoundaryMode::circular, BoundaryMode::replicate}) {
        const Image f = oracle::random_image(rng, 8, 8);
        const auto kw = oracle::random_simplex(rng, 9);
        const auto obj = make_objective(oracle::random_image(rng, 8, 8), 6e-4, mode);
        const auto c = estimate_lipschitz(f, Kernel(3, kw), obj);
        const auto value = [&](const std::vector<double>& p) {
            const Image fp(8, 8, std::vector<double>(p.begin(), p.begin() + 64));
            const std::vector<double> kp(p.begin() + 64, p.end());
            return oracle::data_term(fp, kp, 3, obj.blurred, mode) +
                   obj.lambda * tv_value(fp, obj.tv_variant, obj.tv_epsilon);
        };
        std::vector<double> p(f.values().begin(), f.values().end());
        p.insert(p.end(), kw.begin(), kw.end());
        double worst = 0.0;
        for (int dir = 0; dir < 100; ++dir) {
            auto d = oracle::random_vector(rng, p.size());
            double n = 0.0;
            for (double v : d)
                n += v * v;
            const double h = 1e-3 / std::sqrt(n);
            auto up = p, down = p;
            for (std::size_t i = 0; i < p.size(); ++i) {
                up[i] += h * d[i];
                down[i] -= h * d[i];
            }
            const double curv = (value(up) - 2.0 * value(p) + value(down)) / (1e-6);
            worst = std::max(worst, curv);
        }
        CHECK(c.joint() >= worst);
    }
}

TEST_CASE("curvature estimate is deterministic in the seed")
{
    const auto inst = small_instance(34);
    const auto a = estimate_lipschitz(inst.f_true, inst.k_true, inst.obj, 7);
    const auto b = estimate_lipschitz(inst.f_true, inst.k_true, inst.obj, 7);
    CHECK(a.f_block == b.f_block);
    CHECK(a.k_block == b.k_block);
}

TEST_CASE("adaptive kernel steps")
{
    const std::vector<double> k{0.5, 0.25, 0.25};
    const std::vector<double> g{1.0, -2.0, 0.5};
    const auto eta = adaptive_kernel_steps(k, g, 0.5, 1.0);
    CHECK(eta[0] == doctest::Approx(0.5 * 0.5 / (0.5 * 2.0)));
    CHECK(eta[1] == doctest::Approx(0.5 * 0.5 / (0.25 * 2.0)));
    CHECK(adaptive_kernel_steps(k, g, 0.5, 100.0)[1] == doctest::Approx(0.01));
    for (double e : adaptive_kernel_steps(k, std::vector<double>(3, 0.0), 0.5, 4.0))
        CHECK(e == 0.25);
}

TEST_CASE("fixed points")
{
    std::mt19937_64 rng(35);
    const Image f = oracle::random_image(rng, 8, 8);
    const Kernel k(3, oracle::random_simplex(rng, 9));
    const auto obj = make_objective(convolve(f, k, BoundaryMode::circular), 0.0);
    SolverConfig cfg;
    for (auto algo : {Algorithm::prida, Algorithm::pgd}) {
        cfg.algorithm = algo;
        const auto s0 = initial_state(f, k, obj);
        const auto s1 = algo == Algorithm::prida ? prida_step(s0, obj, cfg) : pgd_step(s0, obj, cfg);
        CHECK(s1.t == 1);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(s1.f.values()[i] == doctest::Approx(f.values()[i]).epsilon(1e-14));
        for (std::size_t i = 0; i < k.size(); ++i)
            CHECK(s1.k.weights()[i] == doctest::Approx(k.weights()[i]).epsilon(1e-14));
    }
}

TEST_CASE("PGD with zero kernel gradient leaves the kernel alone")
{
    // A constant image makes every kernel coordinate see the same gradient,
    // which the projection removes.
    const Image f(6, 6, 0.4);
    const Kernel k(3, {0.1, 0.1, 0.1, 0.1, 0.2, 0.1, 0.1, 0.1, 0.1});
    const auto obj = make_objective(Image(6, 6, 0.3), 0.0);
    SolverConfig cfg;
    cfg.algorithm = Algorithm::pgd;
    const auto s1 = pgd_step(initial_state(f, k, obj), obj, cfg);
    for (std::size_t i = 0; i < 9; ++i)
        CHECK(s1.k.weights()[i] == doctest::Approx(k.weights()[i]).epsilon(1e-12));
}

TEST_CASE("PGD truncates to exact zeros while PRIDA stays positive")
{
    const Image f = synthetic_scene(16, 16, 3);
    const Kernel k_true = line_kernel(5, 4, 0.0);
    const auto obj = make_objective(convolve(f, k_true, BoundaryMode::circular), 0.0);
    SolverConfig cfg;
    cfg.step_mode = StepMode::fixed;
    cfg.fixed_eta = 0.05;
    cfg.descent_guard = false;
    cfg.algorithm = Algorithm::pgd;
    const auto pgd = pgd_step(initial_state(f, uniform_kernel(5), obj), obj, cfg);
    int zeros = 0;
    for (double v : pgd.k.weights())
        zeros += v == 0.0;
    CHECK(zeros > 0);

    cfg.algorithm = Algorithm::prida;
    const auto prida = prida_step(initial_state(f, uniform_kernel(5), obj), obj, cfg);
    CHECK(prida.k.min_weight() > 0.0);
}

TEST_CASE("descent over 20 steps on an 8x8 instance")
{
    for (std::uint64_t seed : {36u, 37u, 38u})
        for (auto algo : {Algorithm::prida, Algorithm::pgd}) {
            const auto inst = small_instance(seed);
            SolverConfig cfg;
            cfg.algorithm = algo;
            cfg.max_iters = 20;
            cfg.tol_move = 0.0;
            const auto out = solve(inst.obj.blurred, uniform_kernel(3), inst.obj, cfg);
            REQUIRE(out.trace.size() == 20);
            double prev = initial_state(inst.obj.blurred, uniform_kernel(3), inst.obj).objective;
            for (const auto& r : out.trace) {
                CHECK(r.objective <= prev + 1e-8);
                prev = r.objective;
            }
            CHECK(out.objective == out.trace.back().objective);
            CHECK(out.objective == doctest::Approx(objective_value(out.f, out.k, inst.obj)).epsilon(1e-14));
        }
}

TEST_CASE("descent without the guard under the adaptive step")
{
    const auto inst = small_instance(39);
    SolverConfig cfg;
    cfg.max_iters = 20;
    cfg.tol_move = 0.0;
    cfg.descent_guard = false;
    const auto out = solve(inst.obj.blurred, uniform_kernel(3), inst.obj, cfg);
    double prev = initial_state(inst.obj.blurred, uniform_kernel(3), inst.obj).objective;
    for (const auto& r : out.trace) {
        CHECK(r.objective <= prev + 1e-8);
        prev = r.objective;
    }
}

TEST_CASE("movement is summable against the objective drop")
{
    const auto inst = small_instance(40);
    SolverConfig cfg;
    cfg.max_iters = 200;
    cfg.tol_move = 0.0;
    const double start = initial_state(inst.obj.blurred, uniform_kernel(3), inst.obj).objective;
    const auto out = solve(inst.obj.blurred, uniform_kernel(3), inst.obj, cfg);
    const auto c = estimate_lipschitz(inst.obj.blurred, uniform_kernel(3), inst.obj, cfg.seed);
    double moves = 0.0, lowest = start;
    for (const auto& r : out.trace) {
        moves += r.move_l2 * r.move_l2;
        lowest = std::min(lowest, r.objective);
    }
    // The step never exceeds 1/L_min of the two blocks, so the per-step
    // decrease is at least (L_min/2) |move|^2.
    const double l_min = std::min(c.f_block, c.k_block_l1);
    CHECK(moves <= 2.0 * (start - lowest) / l_min + 1e-10);
}

TEST_CASE("iterates stay on the simplex and strictly positive")
{
    const auto inst = small_instance(41);
    SolverConfig cfg;
    cfg.max_iters = 1;
    cfg.tol_move = 0.0;
    auto state = initial_state(inst.obj.blurred, uniform_kernel(3), inst.obj);
    const auto curvature = estimate_lipschitz(state.f, state.k, inst.obj, cfg.seed);
    for (int t = 0; t < 100; ++t) {
        state = prida_step(state, inst.obj, cfg, curvature);
        REQUIRE(on_simplex(state.k.weights()));
        REQUIRE(state.k.min_weight() > 0.0);
    }
    CHECK(state.t == 100);
    CHECK(state.trace.size() == 100);
}

TEST_CASE("zero iterations returns the evaluated start")
{
    const auto inst = small_instance(42);
    SolverConfig cfg;
    cfg.max_iters = 0;
    const auto out = solve(inst.obj.blurred, uniform_kernel(3), inst.obj, cfg);
    CHECK(out.t == 0);
    CHECK(out.trace.empty());
    CHECK(out.objective == objective_value(inst.obj.blurred, uniform_kernel(3), inst.obj));
}

TEST_CASE("tolerance stops early")
{
    const auto inst = small_instance(43);
    SolverConfig cfg;
    cfg.max_iters = 5000;
    cfg.tol_move = 1e-3;
    const auto out = solve(inst.obj.blurred, uniform_kernel(3), inst.obj, cfg);
    CHECK(out.t < 5000);
    CHECK(out.trace.back().move_l2 < 1e-3);
    CHECK(default_tol_move(64, 9) == doctest::Approx(1e-7 * std::sqrt(73.0)));
}

TEST_CASE("entropic steps need a positive kernel")
{
    const auto inst = small_instance(44);
    SolverConfig cfg;
    CHECK_THROWS_AS(solve(inst.obj.blurred, delta_kernel(3), inst.obj, cfg), ArgumentError);
    cfg.algorithm = Algorithm::pgd;
    CHECK_NOTHROW(solve(inst.obj.blurred, delta_kernel(3), inst.obj, cfg));
}

TEST_CASE("non-finite objective raises with the trace attached")
{
    const auto inst = small_instance(45);
    SolverConfig cfg;
    cfg.step_mode = StepMode::fixed;
    cfg.fixed_eta = 1e6;
    cfg.descent_guard = false;
    cfg.max_iters = 500;
    cfg.tol_move = 0.0;
    bool thrown = false;
    try {
        solve(inst.obj.blurred, uniform_kernel(3), inst.obj, cfg);
    } catch (const NumericalFailure& e) {
        thrown = true;
        CHECK(!e.trace().empty());
    }
    CHECK(thrown);
}

TEST_CASE("kernel-only problem reaches the KKT minimizer")
{
    const Image f = synthetic_scene(16, 16, 5);
    const Kernel k_true = line_kernel(3, 2.5, 30.0);
    Image b = add_noise(convolve(f, k_true, BoundaryMode::circular), NoiseSpec{NoiseKind::gaussian_pixel, 0.05, 9});
    const auto obj = make_objective(b, 0.0);

    std::vector<std::vector<double>> q;
    std::vector<double> c;
    oracle::kernel_quadratic(f, b, 3, BoundaryMode::circular, q, c);
    const auto best = oracle::simplex_qp_kkt(q, c);
    REQUIRE(best.size() == 9);

    SolverConfig cfg;
    cfg.max_iters = 10000;
    cfg.tol_move = 0.0;
    const auto out = solve_kernel_only(f, uniform_kernel(3), obj, cfg);
    CHECK(l1_distance(out.k.weights(), best) <= 1e-3);
    for (std::size_t i = 0; i < f.size(); ++i)
        REQUIRE(out.f.values()[i] == f.values()[i]);
}

TEST_CASE("blur-free observation concentrates the kernel on the center")
{
    const Image f = synthetic_scene(32, 32, 6);
    const auto obj = make_objective(f, 1e-2);
    SolverConfig cfg;
    cfg.max_iters = 5000;
    const auto out = solve(f, uniform_kernel(3), obj, cfg);
    CHECK(out.k(1, 1) >= 0.99);
}
