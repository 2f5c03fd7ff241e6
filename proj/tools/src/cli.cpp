#include "prida/cli.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "prida/optimizer.hpp"

namespace prida::cli {

namespace {

struct SharedFlags {
    std::string algo = "prida";
    std::string tv = "isotropic";
    std::string boundary = "circular";
    std::string step_mode = "adaptive";
    double lipschitz = 0.0;
    bool descent_guard = false;
    bool no_descent_guard = false;
};

void add_objective_flags(CLI::App* cmd, ObjectiveParams& p, SharedFlags& s)
{
    cmd->add_option("--lambda", p.lambda, "TV weight")->capture_default_str();
    cmd->add_option("--tv", s.tv, "isotropic or anisotropic")->capture_default_str();
    cmd->add_option("--boundary", s.boundary, "circular or replicate")->capture_default_str();
    cmd->add_option("--tv-eps", p.tv_epsilon, "TV smoothing")->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, SolverConfig& c, SharedFlags& s, bool bench)
{
    cmd->add_option("--iters", c.max_iters, "Iterations per pyramid level")->capture_default_str();
    cmd->add_option("--big-m", c.big_m, "Cap on the multiplicative kernel update")->capture_default_str();
    cmd->add_option("--alpha", c.alpha, "Per-coordinate kernel step parameter")->capture_default_str();
    cmd->add_option("--step-mode", s.step_mode, "adaptive or fixed")->capture_default_str();
    cmd->add_option("--eta", c.fixed_eta, "Step size for --step-mode fixed")->capture_default_str();
    cmd->add_option("--lipschitz", s.lipschitz, "Fixed curvature constant (default: estimate per level)");
    cmd->add_option("--relip-every", c.relip_every, "Re-estimate curvature every N iterations")
        ->capture_default_str();
    cmd->add_option("--tol-move", c.tol_move, "Stop when an update moves less than this (negative: auto)")
        ->capture_default_str();
    if (bench)
        cmd->add_flag("--descent-guard", s.descent_guard, "Halve steps that raise the objective");
    else
        cmd->add_flag("--no-descent-guard", s.no_descent_guard, "Accept every step as computed");
}

void add_instance_flags(CLI::App* cmd, InstanceSpec& spec, std::string& shape)
{
    cmd->add_option("--size", spec.size, "Synthetic image side")->capture_default_str();
    cmd->add_option("--kernel-size", spec.kernel_size, "Kernel side (odd)")->capture_default_str();
    cmd->add_option("--kernel", shape, "line, gaussian, shake or delta")->capture_default_str();
    cmd->add_option("--seed", spec.seed, "Instance seed")->capture_default_str();
}

void apply(const SharedFlags& s, ObjectiveParams& p, SolverConfig& c, bool bench)
{
    p.tv_variant = parse_tv_variant(s.tv);
    p.boundary = parse_boundary(s.boundary);
    c.algorithm = parse_algorithm(s.algo);
    if (s.step_mode == "adaptive")
        c.step_mode = StepMode::adaptive;
    else if (s.step_mode == "fixed")
        c.step_mode = StepMode::fixed;
    else
        throw ArgumentError("unknown step mode '" + s.step_mode + "'");
    if (s.lipschitz > 0.0)
        c.lipschitz = s.lipschitz;
    c.descent_guard = bench ? s.descent_guard : !s.no_descent_guard;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Blind deblurring with entropic kernel updates"};
    app.require_subcommand(1);

    DeblurOptions deblur;
    SharedFlags deblur_flags;
    double deblur_sigma_255 = 0.0;
    auto* c_deblur = app.add_subcommand("deblur", "Recover a sharp image and blur kernel");
    c_deblur->add_option("input", deblur.input, "Blurred PNG or PGM")->required();
    c_deblur->add_option("-o,--out", deblur.out, "Output directory")->capture_default_str();
    c_deblur->add_option("--kernel-size", deblur.kernel_size, "Kernel side (odd)")->capture_default_str();
    c_deblur->add_option("--algo", deblur_flags.algo, "prida or pgd")->capture_default_str();
    c_deblur->add_option("--scale-factor", deblur.scale_factor, "Pyramid scale per level")->capture_default_str();
    c_deblur->add_option("--sigma", deblur_sigma_255, "Add Gaussian noise first (units of 1/255)");
    c_deblur->add_option("--noise-seed", deblur.noise.seed, "Seed for --sigma")->capture_default_str();
    c_deblur->add_option("--seed", deblur.solver.seed, "Power-iteration seed")->capture_default_str();
    add_objective_flags(c_deblur, deblur.params, deblur_flags);
    add_solver_flags(c_deblur, deblur.solver, deblur_flags, false);

    ConvergenceOptions conv;
    SharedFlags conv_flags;
    std::string conv_shape = "line";
    auto* c_conv = app.add_subcommand("bench-convergence", "PRIDA and PGD traces at the finest level");
    c_conv->add_option("-o,--out", conv.out, "Output directory")->capture_default_str();
    c_conv->add_option("--input", conv.input, "Blurred image to use instead of a synthetic instance");
    c_conv->add_option("--iterations", conv.iterations, "Finest-level iterations")->capture_default_str();
    c_conv->add_option("--timing", conv.timing, "Also write wall times to this CSV");
    add_instance_flags(c_conv, conv.instance, conv_shape);
    add_objective_flags(c_conv, conv.params, conv_flags);
    add_solver_flags(c_conv, conv.solver, conv_flags, true);

    NoiseOptions noise;
    SharedFlags noise_flags;
    std::string noise_shape = "line";
    std::vector<std::string> noise_algos{"prida", "pgd"};
    noise.solver.max_iters = 2000;
    auto* c_noise = app.add_subcommand("bench-noise", "Kernel error and PSNR against noise level");
    c_noise->add_option("-o,--out", noise.out, "Output directory")->capture_default_str();
    c_noise->add_option("--instances", noise.instances, "Number of synthetic instances")->capture_default_str();
    c_noise->add_option("--sigmas", noise.sigmas_255, "Noise levels in units of 1/255")
        ->delimiter(',')
        ->capture_default_str();
    c_noise->add_option("--algos", noise_algos, "Algorithms to compare")->delimiter(',')->capture_default_str();
    c_noise->add_option("--timing", noise.timing, "Also write wall times to this CSV");
    add_instance_flags(c_noise, noise.instance, noise_shape);
    add_objective_flags(c_noise, noise.params, noise_flags);
    add_solver_flags(c_noise, noise.solver, noise_flags, true);

    StabilityOptions stab;
    std::vector<int> stab_sizes = stab.suite.sizes;
    auto* c_stab = app.add_subcommand("bench-stability", "Randomized perturbation suite for the kernel step");
    c_stab->add_option("-o,--out", stab.out, "Output directory")->capture_default_str();
    c_stab->add_option("--trials", stab.suite.trials, "Number of trials")->capture_default_str();
    c_stab->add_option("--sizes", stab_sizes, "Kernel lengths, cycled")->delimiter(',')->capture_default_str();
    c_stab->add_option("--seed", stab.suite.seed, "Suite seed")->capture_default_str();
    c_stab->add_option("--rhs-scale", stab.suite.rhs_scale, "Multiply the bound before comparing")
        ->capture_default_str();

    SelftestOptions self;
    auto* c_self = app.add_subcommand("selftest", "Quick internal consistency checks");
    c_self->add_option("--seed", self.seed, "Seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_io;
    }

    try {
        if (*c_deblur) {
            apply(deblur_flags, deblur.params, deblur.solver, false);
            if (deblur_sigma_255 < 0.0)
                throw ArgumentError("--sigma must be nonnegative");
            deblur.noise.sigma = deblur_sigma_255 / 255.0;
            return cmd_deblur(deblur, out);
        }
        if (*c_conv) {
            apply(conv_flags, conv.params, conv.solver, true);
            conv.instance.shape = parse_kernel_shape(conv_shape);
            return cmd_bench_convergence(conv, out);
        }
        if (*c_noise) {
            apply(noise_flags, noise.params, noise.solver, true);
            noise.instance.shape = parse_kernel_shape(noise_shape);
            noise.algos.clear();
            for (const auto& a : noise_algos)
                noise.algos.push_back(parse_algorithm(a));
            return cmd_bench_noise(noise, out);
        }
        if (*c_stab) {
            stab.suite.sizes = stab_sizes;
            return cmd_bench_stability(stab, out);
        }
        if (*c_self)
            return cmd_selftest(self, out);
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    }
    return exit_io;
}

} // namespace prida::cli
