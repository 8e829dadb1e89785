#include "invscat/config.hpp"

#include <cmath>

namespace invscat {

std::map<std::string, double> RunConfig::default_tolerances() {
  return {
      {"volterra.tol_fixpoint", 1e-12},
      {"volterra.max_iter", 500},
      {"volterra.truncation_guard", 1e-10},
      {"jost.eps_zero", 1e-8},
      {"jost.resonance_threshold", 1e-6},
      {"bound.kappa_min", 1e-3},
      {"bound.scan_step", 0.01},
      {"bound.tol_root", 1e-12},
      {"bound.derivative_step", 1e-4},
      {"bound.eps_degenerate", 1e-10},
      {"norming.tol_imag", 1e-8},
      {"norming.oracle", 1e-3},
      {"validate.unitarity", 1e-6},
      {"validate.symmetry", 1e-10},
      {"validate.inverse", 1e-10},
      {"validate.infinity", 0.1},
      {"synth.tail_order", 3},
      {"synth.tail_fit_from", 0.5},
      {"synth.tol_imag", 1e-8},
      {"recover.window_fraction", 1.0 / 3.0},
      {"recover.tol_zero", 1e-4},
      {"recover.tol_fit", 1e-8},
      {"recover.improvement", 1e-2},
      {"recover.max_order", 6},
      {"marchenko.tol_solve", 1e-12},
      {"marchenko.tikhonov", 0.0},
      {"fixpoint.tol", 1e-13},
      {"fixpoint.max_iter", 1000},
      {"estimates.exclusion", 1e-12},
      {"support.tol", 1e-5},
      {"support.delta", 0.05},
      {"tail.max_exponent", -2.0},
      {"tail.l2_exponent", -0.75},
      {"tail.negligible", 1e-12},
  };
}

double RunConfig::tol(const std::string& name) const {
  auto it = tolerances.find(name);
  if (it == tolerances.end()) throw ValidationError("unknown tolerance '" + name + "'");
  return it->second;
}

void RunConfig::check() const {
  auto positive = [](const char* what, double v) {
    if (!(v > 0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive");
  };
  positive("x_max", x_max);
  positive("h", h);
  positive("k_max", k_max);
  positive("dk", dk);
  if (!(x_neg < 0)) throw ValidationError("x_neg must be negative");
  const auto defaults = default_tolerances();
  for (const auto& [name, v] : tolerances) {
    if (!defaults.count(name)) throw ValidationError("unknown tolerance '" + name + "'");
    if (!std::isfinite(v)) throw ValidationError("tolerance '" + name + "' is not finite");
  }
  if (std::max(std::abs(x_neg), 2 * x_max) * dk > 1.0)
    throw ValidationError("F grid violates the resolution constraint |x| dk <= 1");
  try {
    potential_grid();
    k_grid();
    f_grid();
  } catch (const Error& e) {
    throw ValidationError(std::string("grid: ") + e.what());
  }
  if (!k_grid().symmetric()) throw ValidationError("k-grid must have an even number of intervals");
}

VolterraOptions RunConfig::volterra() const {
  VolterraOptions o;
  o.tol_fixpoint = tol("volterra.tol_fixpoint");
  o.max_iter = int(tol("volterra.max_iter"));
  o.truncation_guard = tol("volterra.truncation_guard");
  return o;
}

JostOptions RunConfig::jost() const { return {tol("jost.eps_zero"), tol("jost.resonance_threshold")}; }

BoundStateOptions RunConfig::bound_states() const {
  BoundStateOptions o;
  o.kappa_min = tol("bound.kappa_min");
  o.scan_step = tol("bound.scan_step");
  o.tol_root = tol("bound.tol_root");
  o.derivative_step = tol("bound.derivative_step");
  o.eps_degenerate = tol("bound.eps_degenerate");
  return o;
}

NormingOptions RunConfig::norming() const { return {tol("norming.tol_imag"), tol("norming.oracle")}; }

ValidationOptions RunConfig::validation(bool levinson_strict) const {
  ValidationOptions o;
  o.tol_unitarity = tol("validate.unitarity");
  o.tol_symmetry = tol("validate.symmetry");
  o.tol_inverse = tol("validate.inverse");
  o.tol_infinity = tol("validate.infinity");
  o.levinson_strict = levinson_strict;
  return o;
}

SynthesisOptions RunConfig::synthesis() const {
  SynthesisOptions o;
  o.tail_order = int(tol("synth.tail_order"));
  o.tail_fit_from = tol("synth.tail_fit_from");
  o.tol_imag = tol("synth.tol_imag");
  return o;
}

RecoveryOptions RunConfig::recovery() const {
  RecoveryOptions o;
  o.k_max = k_max;
  o.dk = dk;
  o.window_fraction = tol("recover.window_fraction");
  o.tol_zero = tol("recover.tol_zero");
  o.tol_fit = tol("recover.tol_fit");
  o.improvement = tol("recover.improvement");
  o.max_order = int(tol("recover.max_order"));
  return o;
}

MarchenkoSolveOptions RunConfig::marchenko() const {
  MarchenkoSolveOptions o;
  o.tol_solve = tol("marchenko.tol_solve");
  o.tikhonov = tol("marchenko.tikhonov");
  return o;
}

FixedPointOptions RunConfig::fixed_point() const {
  FixedPointOptions o;
  o.tol = tol("fixpoint.tol");
  o.max_iter = int(tol("fixpoint.max_iter"));
  return o;
}

ConditionCOptions RunConfig::condition_C() const { return {tol("tail.max_exponent"), tol("tail.negligible")}; }

}  // namespace invscat
