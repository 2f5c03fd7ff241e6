#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "prida/pyramid.hpp"
#include "prida/robustness.hpp"
#include "prida/types.hpp"

namespace prida::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_io = 1,
    exit_numerical = 2,
    exit_property = 3,
};

enum class KernelShape { line, gaussian, shake, delta };

KernelShape parse_kernel_shape(const std::string& s);

/// Seeded synthetic instances. Instance i uses scene seed `seed + i`.
struct InstanceSpec {
    int size = 64;
    int kernel_size = 9;
    KernelShape shape = KernelShape::line;
    std::uint64_t seed = 1;
};

struct Instance {
    Image sharp;
    Kernel kernel;
};

Instance make_instance(const InstanceSpec& spec, int index);

struct DeblurOptions {
    std::filesystem::path input;
    std::filesystem::path out = ".";
    int kernel_size = 27;
    ObjectiveParams params;
    SolverConfig solver;
    double scale_factor = 1.0 / std::sqrt(2.0);
    // Optional noise added to the input before solving.
    NoiseSpec noise;
};

struct ConvergenceOptions {
    std::filesystem::path out = ".";
    // When set, the observation is read from here instead of synthesized.
    std::filesystem::path input;
    InstanceSpec instance;
    ObjectiveParams params;
    SolverConfig solver;
    int iterations = 1000;
    std::filesystem::path timing;
};

struct NoiseOptions {
    std::filesystem::path out = ".";
    InstanceSpec instance;
    int instances = 5;
    // Standard deviations in units of 1/255.
    std::vector<double> sigmas_255{1, 3, 5, 7, 9};
    std::vector<Algorithm> algos{Algorithm::prida, Algorithm::pgd};
    ObjectiveParams params;
    SolverConfig solver;
    std::filesystem::path timing;
};

struct StabilityOptions {
    std::filesystem::path out = ".";
    StabilitySuiteConfig suite;
};

struct SelftestOptions {
    std::uint64_t seed = 1;
};

int cmd_deblur(const DeblurOptions& opt, std::ostream& log);
int cmd_bench_convergence(const ConvergenceOptions& opt, std::ostream& log);
int cmd_bench_noise(const NoiseOptions& opt, std::ostream& log);
int cmd_bench_stability(const StabilityOptions& opt, std::ostream& log);
int cmd_selftest(const SelftestOptions& opt, std::ostream& log);

/// Parses argv and dispatches. Usage errors return exit_io.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Worker count for bench fan-out: PRIDA_THREADS if set and positive,
/// otherwise the hardware concurrency.
int thread_cap();

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

} // namespace prida::cli
