#pragma once

#include <limits>
#include <span>
#include <vector>

namespace prida {

inline constexpr double kNoCap = std::numeric_limits<double>::infinity();

/// KL(x||y) = sum x_i log(x_i / y_i), with 0 log 0 = 0. Returns +inf when
/// some y_i = 0 while x_i > 0.
double kl(std::span<const double> x, std::span<const double> y);

/// Exponentiated-gradient step on the simplex:
///   normalize( k_i * min(exp(-eta_i g_i), big_m) ).
/// Multipliers are formed in log space once any exponent leaves the safe
/// double range, so the output stays strictly positive.
std::vector<double> entropic_step(std::span<const double> k, std::span<const double> g, std::span<const double> eta,
                                  double big_m);

/// Scalar-step convenience overload.
std::vector<double> entropic_step(std::span<const double> k, std::span<const double> g, double eta, double big_m);

/// argmin_{x in simplex} <z, x> + KL(x||k), via x_i proportional to k_i exp(-z_i).
std::vector<double> kl_prox(std::span<const double> k, std::span<const double> z);

/// Euclidean projection onto the simplex by sort and threshold.
std::vector<double> project_simplex(std::span<const double> v);

/// Threshold tau with project_simplex(v) = max(v - tau, 0).
double simplex_threshold(std::span<const double> v);

/// LHS - RHS of the three-point inequality for the KL prox
///   <z,y> + KL(y||x0) >= <z,x*> + KL(x*||x0) + KL(y||x*),  x* = kl_prox(x0, z).
double three_point_gap(std::span<const double> z, std::span<const double> x0, std::span<const double> y);

double l1_distance(std::span<const double> a, std::span<const double> b);
double l2_distance(std::span<const double> a, std::span<const double> b);

} // namespace prida
