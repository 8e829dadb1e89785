#include "invscat/potential.hpp"

#include <numbers>

namespace invscat {

Potential::Potential(RealFunction q_, std::optional<double> a, std::string label_)
    : q(std::move(q_)), support_radius(a), label(std::move(label_)) {
  if (std::abs(q.grid.x_min()) > 1e-12) throw RangeError("potential grid must start at x = 0");
  if (support_radius) {
    if (!(*support_radius > 0)) throw RangeError("support radius must be positive");
    const double tol = 1e-9 * q.grid.step();
    for (Index i = 0; i < q.size(); ++i)
      if (q.x(i) > *support_radius + tol && q.values(i) != 0.0)
        throw ValidationError("potential nonzero beyond its support radius at x = " + std::to_string(q.x(i)));
  }
}

RealFunction sigma_q(const Potential& p) {
  VectorXd a = p.q.values.cwiseAbs();
  return RealFunction(p.grid(), tail_integral(a, p.grid().step(), true));
}

L11Report check_L11(const Potential& p, double x0) {
  const Grid& g = p.grid();
  if (x0 < 0 || x0 >= g.x_max()) throw RangeError("check_L11 needs 0 <= x0 < X");
  VectorXd w = g.points().cwiseProduct(p.q.values.cwiseAbs());
  RealFunction tail(g, tail_integral(w, g.step(), true));
  L11Report r;
  r.value = tail(x0);
  r.tail = tail_decay_verdict(g, w);
  r.finite = r.tail.finite;
  return r;
}

double total_charge(const Potential& p) { return integrate(p.q); }

namespace potentials {

Potential from_function(const Grid& g, const std::function<double(double)>& q, std::string label,
                        std::optional<double> support_radius) {
  return Potential(RealFunction::from(g, q), support_radius, std::move(label));
}

Potential zero(const Grid& g) {
  return Potential(RealFunction(g, VectorXd::Zero(g.size())), {}, "zero");
}

Potential sech2_well(const Grid& g, double kappa, double depth_factor) {
  return from_function(g, [=](double x) {
    double c = std::cosh(kappa * x);
    return -2.0 * depth_factor * kappa * kappa / (c * c);
  }, "sech2 well");
}

Potential gaussian_bump(const Grid& g, double depth, double center, double width, double cutoff) {
  return from_function(g, [=](double x) {
    if (x > cutoff) return 0.0;
    double t = (x - center) / width;
    return -depth * std::exp(-t * t);
  }, "truncated gaussian", cutoff);
}

Potential polynomial_bump(const Grid& g, double a, double depth) {
  return from_function(g, [=](double x) { return x <= a ? -depth * x * x * (a - x) * (a - x) : 0.0; },
                       "polynomial bump", a);
}

Potential narrow_bump(const Grid& g, double area, double center, double width) {
  return from_function(g, [=](double x) {
    double t = x - center;
    if (std::abs(t) >= width) return 0.0;
    double c = std::cos(std::numbers::pi * t / (2 * width));
    return area / width * c * c;
  }, "narrow bump", center + width);
}

}  // namespace potentials

}  // namespace invscat
