#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace prida {

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major grid of intensities. Values live in [0,1] on load and on final
/// output; solver iterates may leave that range.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);
    Image(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double operator()(int x, int y) const { return data_[index(x, y)]; }
    double& operator()(int x, int y) { return data_[index(x, y)]; }

    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    bool same_shape(const Image& other) const
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    Image clamped() const;

private:
    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

inline constexpr double kSimplexTolerance = 1e-9;

/// Square blur kernel with odd side, constrained to the probability simplex.
class Kernel {
public:
    Kernel() = default;

    /// Validates odd side, nonnegativity and unit mass (within kSimplexTolerance).
    Kernel(int side, std::vector<double> weights);

    int side() const { return side_; }
    int center() const { return side_ / 2; }
    std::size_t size() const { return weights_.size(); }

    double operator()(int u, int v) const
    {
        return weights_[static_cast<std::size_t>(v) * static_cast<std::size_t>(side_) +
                        static_cast<std::size_t>(u)];
    }

    std::span<const double> weights() const { return weights_; }

    double max_weight() const;
    double min_weight() const;

private:
    int side_ = 0;
    std::vector<double> weights_;
};

/// k_i = 1/s for every entry; side must be odd.
Kernel uniform_kernel(int side);

/// All mass on the center pixel.
Kernel delta_kernel(int side);

/// Rescales nonnegative weights to unit mass. Throws if the total is not positive.
Kernel normalized_kernel(int side, std::vector<double> weights);

bool on_simplex(std::span<const double> w, double tol = kSimplexTolerance);

enum class TvVariant { anisotropic_p1, isotropic_p2 };
enum class BoundaryMode { circular, replicate };

struct Objective {
    Image blurred;
    double lambda = 6e-4;
    TvVariant tv_variant = TvVariant::isotropic_p2;
    BoundaryMode boundary = BoundaryMode::circular;
    double tv_epsilon = 1e-3;

    void validate() const;
};

enum class Algorithm { prida, pgd };
enum class StepMode { adaptive, fixed };

struct SolverConfig {
    Algorithm algorithm = Algorithm::prida;
    int max_iters = 1000;
    StepMode step_mode = StepMode::adaptive;
    double alpha = 0.5;
    double fixed_eta = 1e-3;
    double big_m = 1000.0;
    // nullopt means estimate per pyramid level.
    std::optional<double> lipschitz;
    // Negative selects the scale-aware default 1e-7 * sqrt(n + s).
    double tol_move = -1.0;
    // Re-estimate curvature every N iterations; 0 keeps one estimate per level.
    int relip_every = 0;
    // Halve the step when a trial step raises the objective.
    bool descent_guard = true;
    std::uint64_t seed = 0x5eed;

    void validate() const;
};

struct TraceRecord {
    int t = 0;
    double objective = 0.0;
    double eta_f = 0.0;
    double eta_k_max = 0.0;
    double move_l2 = 0.0;
    double kl_step = 0.0;
};

using Trace = std::vector<TraceRecord>;

std::string to_string(TvVariant v);
std::string to_string(BoundaryMode m);
std::string to_string(Algorithm a);
TvVariant parse_tv_variant(const std::string& s);
BoundaryMode parse_boundary(const std::string& s);
Algorithm parse_algorithm(const std::string& s);

} // namespace prida
