#include "magd/objectives.hpp"

#include <cmath>
#include <utility>

namespace magd {

namespace {

void require_dim(const Point& p, std::size_t dim, const char* name) {
  if (p.size() != dim) {
    throw ConfigError(std::string(name) + ": expected dimension " +
                      std::to_string(dim) + ", got " + std::to_string(p.size()));
  }
}

}  // namespace

double quadratic_eval(const Point& p) {
  require_dim(p, 2, "quadratic");
  const double dx = p[0] - 2.0;
  const double dy = p[1] + 4.0;
  return dx * dx + dy * dy;
}

Point quadratic_grad(const Point& p) {
  require_dim(p, 2, "quadratic");
  return {2.0 * (p[0] - 2.0), 2.0 * (p[1] + 4.0)};
}

double rosenbrock_eval(const Point& p) {
  require_dim(p, 2, "rosenbrock");
  const double x = p[0];
  const double y = p[1];
  const double a = x - 1.0;
  const double b = y - x * x;
  return (a * a + 100.0 * b * b) * 1e-6;
}

Point rosenbrock_grad(const Point& p) {
  require_dim(p, 2, "rosenbrock");
  const double x = p[0];
  const double y = p[1];
  const double b = y - x * x;
  return {(2.0 * (x - 1.0) - 400.0 * x * b) * 1e-6, (200.0 * b) * 1e-6};
}

double double_well_eval(const Point& p) {
  require_dim(p, 2, "doublewell");
  const double x = p[0];
  const double y = p[1];
  const double w = x * x - 1.0;
  return w * w + 0.3 * x + y * y;
}

Point double_well_grad(const Point& p) {
  require_dim(p, 2, "doublewell");
  const double x = p[0];
  return {4.0 * x * (x * x - 1.0) + 0.3, 2.0 * p[1]};
}

Objective quadratic_objective() {
  return {"quadratic", 2, quadratic_eval, quadratic_grad};
}

Objective rosenbrock_objective() {
  return {"rosenbrock", 2, rosenbrock_eval, rosenbrock_grad};
}

Objective double_well_objective() {
  return {"doublewell", 2, double_well_eval, double_well_grad};
}

Objective objective_by_name(std::string_view name) {
  if (name == "quadratic") return quadratic_objective();
  if (name == "rosenbrock") return rosenbrock_objective();
  if (name == "doublewell") return double_well_objective();
  throw ConfigError("unknown objective '" + std::string(name) +
                    "' (expected quadratic, rosenbrock, or doublewell)");
}

Point finite_difference_gradient(const Objective& obj, const Point& p, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ConfigError("finite_difference_gradient: h must be positive and finite");
  }
  if (!is_finite(p)) {
    throw DivergenceError("finite_difference_gradient: non-finite input point");
  }
  Point grad(p.size());
  Point probe = p;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double saved = probe[c];
    probe[c] = saved + h;
    const double fp = obj.evaluate(probe);
    probe[c] = saved - h;
    const double fm = obj.evaluate(probe);
    probe[c] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw DivergenceError("finite_difference_gradient: non-finite evaluation near coordinate " +
                            std::to_string(c));
    }
    grad[c] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

Objective make_objective(std::string name, std::size_t dimension,
                         std::function<double(const Point&)> evaluate, double h) {
  Objective obj;
  obj.name = std::move(name);
  obj.dimension = dimension;
  obj.evaluate = std::move(evaluate);
  obj.gradient = [obj, h](const Point& p) {
    return finite_difference_gradient(obj, p, h);
  };
  return obj;
}

}  // namespace magd
