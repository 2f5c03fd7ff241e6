#include "prida/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <thread>

#include "prida/conv.hpp"
#include "prida/io.hpp"
#include "prida/metrics.hpp"
#include "prida/optimizer.hpp"
#include "prida/simplex.hpp"
#include "prida/synthetic.hpp"
#include "prida/tv.hpp"

namespace prida::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_csv(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish_csv(std::ofstream& out, const fs::path& path)
{
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

// Runs task(i) for i in [0, n) on up to thread_cap() workers. The first
// exception (by task index) is rethrown after every worker has joined.
void parallel_for(int n, const std::function<void(int)>& task)
{
    const int workers = std::max(1, std::min(thread_cap(), n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    const auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

int report_numerical(const NumericalFailure& e, const fs::path& out, std::ostream& log)
{
    log << "numerical failure: " << e.what() << '\n';
    try {
        ensure_dir(out);
        write_trace_csv(e.trace(), out / "failure_trace.csv");
        log << "trace written to " << (out / "failure_trace.csv").string() << '\n';
    } catch (const std::exception& io) {
        log << "could not dump trace: " << io.what() << '\n';
    }
    return exit_numerical;
}

} // namespace

KernelShape parse_kernel_shape(const std::string& s)
{
    if (s == "line")
        return KernelShape::line;
    if (s == "gaussian")
        return KernelShape::gaussian;
    if (s == "shake")
        return KernelShape::shake;
    if (s == "delta")
        return KernelShape::delta;
    throw ArgumentError("unknown kernel shape '" + s + "'");
}

Instance make_instance(const InstanceSpec& spec, int index)
{
    if (spec.size <= 0)
        throw ArgumentError("instance size must be positive");
    if (spec.kernel_size <= 0 || spec.kernel_size % 2 == 0 || spec.kernel_size > spec.size)
        throw ArgumentError("instance kernel size must be odd and fit the image");
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(index);
    Instance inst;
    inst.sharp = synthetic_scene(spec.size, spec.size, seed);
    const int side = spec.kernel_size;
    switch (spec.shape) {
    case KernelShape::line:
        inst.kernel = line_kernel(side, std::max(1, side - 2), 30.0 * static_cast<double>(seed));
        break;
    case KernelShape::gaussian:
        inst.kernel = gaussian_kernel(side, std::max(0.5, side / 6.0));
        break;
    case KernelShape::shake:
        inst.kernel = side >= 3 ? shake_kernel(side, seed) : delta_kernel(side);
        break;
    case KernelShape::delta:
        inst.kernel = delta_kernel(side);
        break;
    }
    return inst;
}

int thread_cap()
{
    if (const char* env = std::getenv("PRIDA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

int cmd_deblur(const DeblurOptions& opt, std::ostream& log)
{
    opt.solver.validate();
    Image b = load_image(opt.input);
    if (opt.noise.sigma > 0.0)
        b = add_noise(b, opt.noise);
    if (opt.kernel_size > std::min(b.width(), b.height()))
        throw ArgumentError("kernel size exceeds the image");
    ensure_dir(opt.out);

    MultiscaleResult result;
    try {
        result = solve_multiscale(b, opt.kernel_size, opt.params, opt.solver, opt.scale_factor);
    } catch (const NumericalFailure& e) {
        return report_numerical(e, opt.out, log);
    }

    save_image(result.f.clamped(), opt.out / "recovered.png");
    save_kernel(result.k, opt.out / "kernel.txt");
    save_image(kernel_preview(result.k), opt.out / "kernel.png");
    for (std::size_t i = 0; i < result.traces.size(); ++i)
        write_trace_csv(result.traces[i], opt.out / ("trace_L" + std::to_string(i) + ".csv"));

    log << "levels " << result.plan.levels.size() << ", iterations " << result.total_iterations
        << ", objective " << format_double(result.final_objective) << '\n';
    return exit_ok;
}

int cmd_bench_convergence(const ConvergenceOptions& opt, std::ostream& log)
{
    opt.solver.validate();
    if (opt.iterations <= 0)
        throw ArgumentError("iteration count must be positive");

    Image b;
    if (!opt.input.empty()) {
        b = load_image(opt.input);
    } else {
        const Instance inst = make_instance(opt.instance, 0);
        b = convolve(inst.sharp, inst.kernel, opt.params.boundary);
    }
    const int side = opt.instance.kernel_size;
    if (side > std::min(b.width(), b.height()))
        throw ArgumentError("kernel size exceeds the image");
    ensure_dir(opt.out);

    const Objective obj = opt.params.with_observation(b);
    std::vector<IterateState> runs(2);
    std::vector<double> seconds(2);
    try {
        SolverConfig coarse = opt.solver;
        coarse.algorithm = Algorithm::prida;
        const WarmStart start = coarse_warm_start(b, side, opt.params, coarse);
        const Algorithm algos[2] = {Algorithm::prida, Algorithm::pgd};
        parallel_for(2, [&](int i) {
            SolverConfig cfg = opt.solver;
            cfg.algorithm = algos[i];
            cfg.max_iters = opt.iterations;
            cfg.tol_move = 0.0;
            const auto t0 = std::chrono::steady_clock::now();
            runs[static_cast<std::size_t>(i)] = solve(start.f, start.k, obj, cfg);
            seconds[static_cast<std::size_t>(i)] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        });
    } catch (const NumericalFailure& e) {
        return report_numerical(e, opt.out, log);
    }

    const fs::path path = opt.out / "convergence.csv";
    auto out = open_csv(path);
    out << "t,prida_objective,prida_move_l2,pgd_objective,pgd_move_l2\r\n";
    for (int t = 0; t < opt.iterations; ++t) {
        const auto& p = runs[0].trace[static_cast<std::size_t>(t)];
        const auto& q = runs[1].trace[static_cast<std::size_t>(t)];
        out << t + 1 << ',' << format_double(p.objective) << ',' << format_double(p.move_l2) << ','
            << format_double(q.objective) << ',' << format_double(q.move_l2) << "\r\n";
    }
    finish_csv(out, path);

    if (!opt.timing.empty()) {
        auto tout = open_csv(opt.timing);
        tout << "algo,iterations,runtime_s\r\n";
        tout << "prida," << opt.iterations << ',' << format_double(seconds[0]) << "\r\n";
        tout << "pgd," << opt.iterations << ',' << format_double(seconds[1]) << "\r\n";
        finish_csv(tout, opt.timing);
    }

    log << "final objective prida " << format_double(runs[0].objective) << ", pgd "
        << format_double(runs[1].objective) << '\n';
    return exit_ok;
}

int cmd_bench_noise(const NoiseOptions& opt, std::ostream& log)
{
    opt.solver.validate();
    if (opt.instances <= 0)
        throw ArgumentError("need at least one instance");
    if (opt.sigmas_255.empty() || opt.algos.empty())
        throw ArgumentError("need at least one sigma and one algorithm");
    for (double s : opt.sigmas_255)
        if (!(s >= 0.0))
            throw ArgumentError("noise levels must be nonnegative");
    ensure_dir(opt.out);

    std::vector<double> sigmas;
    for (double s : opt.sigmas_255)
        sigmas.push_back(s / 255.0);

    const int n_algos = static_cast<int>(opt.algos.size());
    const int tasks = opt.instances * n_algos;
    std::vector<std::vector<SweepRow>> rows(static_cast<std::size_t>(tasks));
    try {
        parallel_for(tasks, [&](int task) {
            const int inst_idx = task / n_algos;
            const Instance inst = make_instance(opt.instance, inst_idx);
            SolverConfig cfg = opt.solver;
            cfg.algorithm = opt.algos[static_cast<std::size_t>(task % n_algos)];
            rows[static_cast<std::size_t>(task)] = noise_sweep(inst.sharp, inst.kernel, sigmas, opt.params, cfg,
                                                               opt.instance.seed + static_cast<std::uint64_t>(inst_idx));
        });
    } catch (const NumericalFailure& e) {
        return report_numerical(e, opt.out, log);
    }

    const fs::path runs_path = opt.out / "noise_runs.csv";
    auto runs = open_csv(runs_path);
    runs << "algo,instance,sigma,sigma_255,endpoint_error,psnr,objective,iterations\r\n";
    for (int task = 0; task < tasks; ++task) {
        const std::string algo = to_string(opt.algos[static_cast<std::size_t>(task % n_algos)]);
        for (std::size_t j = 0; j < sigmas.size(); ++j) {
            const auto& r = rows[static_cast<std::size_t>(task)][j];
            runs << algo << ',' << task / n_algos << ',' << format_double(r.sigma) << ','
                 << format_double(opt.sigmas_255[j]) << ',' << format_double(r.endpoint_error) << ','
                 << format_double(r.psnr) << ',' << format_double(r.objective) << ',' << r.iterations << "\r\n";
        }
    }
    finish_csv(runs, runs_path);

    const fs::path summary_path = opt.out / "noise_summary.csv";
    auto summary = open_csv(summary_path);
    summary << "sigma,sigma_255";
    for (Algorithm a : opt.algos)
        summary << ',' << to_string(a) << "_endpoint_error," << to_string(a) << "_psnr";
    summary << "\r\n";
    for (std::size_t j = 0; j < sigmas.size(); ++j) {
        summary << format_double(sigmas[j]) << ',' << format_double(opt.sigmas_255[j]);
        for (int a = 0; a < n_algos; ++a) {
            double epe = 0.0, db = 0.0;
            for (int i = 0; i < opt.instances; ++i) {
                const auto& r = rows[static_cast<std::size_t>(i * n_algos + a)][j];
                epe += r.endpoint_error;
                db += r.psnr;
            }
            summary << ',' << format_double(epe / opt.instances) << ',' << format_double(db / opt.instances);
        }
        summary << "\r\n";
    }
    finish_csv(summary, summary_path);

    if (!opt.timing.empty()) {
        auto tout = open_csv(opt.timing);
        tout << "algo,instance,sigma_255,runtime_s\r\n";
        for (int task = 0; task < tasks; ++task)
            for (std::size_t j = 0; j < sigmas.size(); ++j)
                tout << to_string(opt.algos[static_cast<std::size_t>(task % n_algos)]) << ',' << task / n_algos
                     << ',' << format_double(opt.sigmas_255[j]) << ','
                     << format_double(rows[static_cast<std::size_t>(task)][j].runtime_s) << "\r\n";
        finish_csv(tout, opt.timing);
    }

    log << "wrote " << summary_path.string() << '\n';
    return exit_ok;
}

int cmd_bench_stability(const StabilityOptions& opt, std::ostream& log)
{
    const StabilitySuiteReport report = run_stability_suite(opt.suite);
    ensure_dir(opt.out);
    const fs::path path = opt.out / "stability.csv";
    auto out = open_csv(path);
    out << "trial,s,eta,alpha_bar,lhs,rhs,violated\r\n";
    for (const auto& r : report.records)
        out << r.trial << ',' << r.s << ',' << format_double(r.eta) << ',' << format_double(r.alpha_bar) << ','
            << format_double(r.lhs) << ',' << format_double(r.rhs) << ',' << (r.violated ? 1 : 0) << "\r\n";
    finish_csv(out, path);

    log << report.records.size() << " trials, " << report.violations << " violations\n";
    if (report.first_violation) {
        const auto& v = *report.first_violation;
        log << "counterexample: trial " << v.trial << " s=" << v.s << " eta=" << format_double(v.eta)
            << " alpha_bar=" << format_double(v.alpha_bar) << " lhs=" << format_double(v.lhs)
            << " rhs=" << format_double(v.rhs) << '\n';
        return exit_property;
    }
    return exit_ok;
}

int cmd_selftest(const SelftestOptions& opt, std::ostream& log)
{
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int failures = 0;
    const auto check = [&](const std::string& name, bool ok) {
        log << (ok ? "ok   " : "FAIL ") << name << '\n';
        failures += ok ? 0 : 1;
    };

    // Directional finite difference of the full objective.
    {
        Image f(6, 6), b(6, 6);
        for (double& v : f.values())
            v = unit(rng);
        for (double& v : b.values())
            v = unit(rng);
        std::vector<double> w(9);
        for (double& v : w)
            v = 0.1 + unit(rng);
        const Kernel k = normalized_kernel(3, w);
        Objective obj{b, 1e-2, TvVariant::isotropic_p2, BoundaryMode::circular, 1e-3};
        const Image gf = grad_f_data(f, k, obj);
        const Image gt = tv_grad(f, obj.tv_variant, obj.tv_epsilon);
        Image dir(6, 6);
        double analytic = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            dir.values()[i] = unit(rng) - 0.5;
            analytic += dir.values()[i] * (gf.values()[i] + obj.lambda * gt.values()[i]);
        }
        const double h = 1e-6;
        Image fp = f, fm = f;
        for (std::size_t i = 0; i < f.size(); ++i) {
            fp.values()[i] += h * dir.values()[i];
            fm.values()[i] -= h * dir.values()[i];
        }
        const double numeric = (objective_value(fp, k, obj) - objective_value(fm, k, obj)) / (2 * h);
        check("image gradient", std::abs(numeric - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
    }

    // Entropic step agrees with the KL prox.
    {
        std::vector<double> k(9), g(9), z(9);
        for (double& v : k)
            v = 0.05 + unit(rng);
        const Kernel kk = normalized_kernel(3, k);
        for (double& v : g)
            v = unit(rng) - 0.5;
        const double eta = 0.7;
        for (std::size_t i = 0; i < z.size(); ++i)
            z[i] = eta * g[i];
        const auto a = entropic_step(kk.weights(), g, eta, kNoCap);
        const auto p = kl_prox(kk.weights(), z);
        check("entropic step equals KL prox", l1_distance(a, p) <= 1e-12);
    }

    {
        StabilitySuiteConfig suite;
        suite.trials = 200;
        suite.seed = opt.seed;
        check("stability bound", run_stability_suite(suite).violations == 0);
    }

    {
        InstanceSpec spec;
        spec.size = 24;
        spec.kernel_size = 5;
        spec.seed = opt.seed;
        const Instance inst = make_instance(spec, 0);
        const Image b = convolve(inst.sharp, inst.kernel, BoundaryMode::circular);
        const Objective obj = ObjectiveParams{}.with_observation(b);
        SolverConfig cfg;
        cfg.max_iters = 30;
        cfg.tol_move = 0.0;
        cfg.descent_guard = false;
        bool descent = true;
        for (Algorithm a : {Algorithm::prida, Algorithm::pgd}) {
            cfg.algorithm = a;
            const auto run = solve(b, uniform_kernel(5), obj, cfg);
            double prev = objective_value(b, uniform_kernel(5), obj);
            for (const auto& r : run.trace) {
                descent = descent && r.objective <= prev + 1e-8;
                prev = r.objective;
            }
        }
        check("descent", descent);
    }

    return failures == 0 ? exit_ok : exit_property;
}

} // namespace prida::cli
