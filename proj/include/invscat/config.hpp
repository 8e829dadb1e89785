#pragma once
#include <cstdint>
#include <map>
#include <string>

#include "invscat/estimates.hpp"
#include "invscat/forward.hpp"
#include "invscat/marchenko.hpp"
#include "invscat/scattering.hpp"

namespace invscat {

struct RunConfig {
  double x_max = 15.0;
  double h = 0.01;
  double k_max = 60.0;
  double dk = 0.01;
  double x_neg = -12.0;
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances = default_tolerances();

  static std::map<std::string, double> default_tolerances();

  // ValidationError when a value is out of range, a tolerance name is unknown,
  // or the F grid violates |x| dk <= 1.
  void check() const;
  double tol(const std::string& name) const;

  Grid potential_grid() const { return Grid::with_step(0.0, x_max, h); }
  Grid k_grid() const { return Grid::with_step(-k_max, k_max, dk); }
  Grid f_grid() const { return invscat::f_grid(x_neg, x_max, h); }

  VolterraOptions volterra() const;
  JostOptions jost() const;
  BoundStateOptions bound_states() const;
  NormingOptions norming() const;
  ValidationOptions validation(bool levinson_strict = true) const;
  SynthesisOptions synthesis() const;
  RecoveryOptions recovery() const;
  MarchenkoSolveOptions marchenko() const;
  FixedPointOptions fixed_point() const;
  ConditionCOptions condition_C() const;
};

}  // namespace invscat
