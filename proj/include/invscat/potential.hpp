#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "invscat/numerics.hpp"

namespace invscat {

struct Potential {
  RealFunction q;                       // samples on [0, X]
  std::optional<double> support_radius;  // q = 0 beyond a when set
  std::string label;
  std::vector<std::string> notes;

  Potential() = default;
  Potential(RealFunction q, std::optional<double> support_radius = {}, std::string label = {});

  const Grid& grid() const { return q.grid; }
};

// sigma(x) = integral_x^X |q|.
RealFunction sigma_q(const Potential& p);

struct L11Report {
  bool finite = true;
  double value = 0.0;
  TailVerdict tail;
};
// integral_{x0}^X x|q| dx with a tail-decay finiteness verdict.
L11Report check_L11(const Potential& p, double x0 = 0.0);

double total_charge(const Potential& p);

// Named closed forms sampled onto a grid starting at 0.
namespace potentials {
Potential zero(const Grid& g);
// -2 kappa^2 sech^2(kappa x)
Potential sech2_well(const Grid& g, double kappa = 1.0, double depth_factor = 1.0);
// -depth * exp(-((x-center)/width)^2) on [0, cutoff], zero beyond
Potential gaussian_bump(const Grid& g, double depth, double center, double width, double cutoff);
// -depth * x^2 (a-x)^2 on [0, a], zero beyond
Potential polynomial_bump(const Grid& g, double a, double depth);
// smooth narrow bump of the given area centred at `center`, support [center-width, center+width]
Potential narrow_bump(const Grid& g, double area, double center, double width);
Potential from_function(const Grid& g, const std::function<double(double)>& q, std::string label,
                        std::optional<double> support_radius = {});
}  // namespace potentials

}  // namespace invscat
