#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "magd/types.hpp"

namespace magd {

/// An evaluatable scalar field with gradient. Objectives are stateless and
/// safe to evaluate concurrently.
struct Objective {
  std::string name;
  std::size_t dimension = 0;
  std::function<double(const Point&)> evaluate;
  std::function<Point(const Point&)> gradient;
};

// Built-in benchmark fields (all 2-D).

/// (x-2)^2 + (y+4)^2, minimum 0 at (2, -4).
double quadratic_eval(const Point& p);
Point quadratic_grad(const Point& p);

/// [(x-1)^2 + 100(y-x^2)^2] * 1e-6, minimum 0 at (1, 1). The 1e-6 scaling is
/// part of the definition and is what keeps beta = 0.1 stable on this valley.
double rosenbrock_eval(const Point& p);
Point rosenbrock_grad(const Point& p);

/// (x^2-1)^2 + 0.3x + y^2: a tilted double well with a shallow local minimum
/// near x = +0.96 and the unique global minimum near x = -1.04.
double double_well_eval(const Point& p);
Point double_well_grad(const Point& p);

Objective quadratic_objective();
Objective rosenbrock_objective();
Objective double_well_objective();

/// Looks up "quadratic" | "rosenbrock" | "doublewell". Throws ConfigError on
/// unknown names.
Objective objective_by_name(std::string_view name);

inline constexpr double kDefaultFdStep = 1e-5;

/// Central-difference gradient, (f(p + h e_j) - f(p - h e_j)) / 2h per
/// coordinate. Throws DivergenceError if an evaluation is non-finite.
Point finite_difference_gradient(const Objective& obj, const Point& p,
                                 double h = kDefaultFdStep);

/// Builds an objective from an evaluation function alone; the gradient falls
/// back to central differences with step h.
Objective make_objective(std::string name, std::size_t dimension,
                         std::function<double(const Point&)> evaluate,
                         double h = kDefaultFdStep);

}  // namespace magd
