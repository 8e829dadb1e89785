#pragma once
#include <optional>
#include <string>
#include <vector>

#include "invscat/forward.hpp"
#include "invscat/numerics.hpp"
#include "invscat/report.hpp"

namespace invscat {

struct BoundPair {
  double k = 0.0;
  double s = 0.0;
};

struct ScatteringData {
  Grid k_grid;
  VectorXcd s_values;
  std::vector<BoundPair> bound_states;  // k strictly decreasing
  std::optional<int> index_kappa;

  ScatteringData() = default;
  ScatteringData(const Grid& k_grid, VectorXcd s_values, std::vector<BoundPair> bound_states = {});

  Index J() const { return Index(bound_states.size()); }
};

ScatteringData scattering_from_jost(const JostData& jd);

struct ValidationOptions {
  double tol_unitarity = 1e-6;   // ||S| - 1|
  double tol_symmetry = 1e-10;   // |S(-k) - conj S(k)|
  double tol_inverse = 1e-10;    // |S(-k) S(k) - 1|
  double tol_infinity = 0.1;     // |S(+-K) - 1|
  bool levinson_strict = true;   // when false a Levinson mismatch does not fail the report
};

struct ValidationReport {
  std::vector<Check> checks;
  int kappa = 0;
  double winding = 0.0;       // unrounded winding number
  bool zero_energy_resonance = false;
  bool condition_A = true;
  bool condition_B = true;

  bool passed() const { return condition_A && condition_B; }
};

// Conditions A and B. The winding number follows the phase of S along the
// k-grid (skipping k = 0, where S may jump when f(0) = 0) and closes the
// contour at |k| = K by the phase of S(K).
ValidationReport validate(const ScatteringData& sd, const ValidationOptions& opts = {});

struct FFunction {
  Grid grid;  // [x_neg, 2X]
  VectorXd values, f_s, f_d;
  VectorXd tail_coefficients;   // model sum a_m (1+ik)^{-m} removed from 1-S before quadrature
  double truncation_residual = 0.0;  // max |1-S(+-K)|
  double imaginary_residue = 0.0;    // max |Im F_s| / max |F_s|

  FFunction() = default;
  FFunction(const Grid& g, VectorXd f_s, VectorXd f_d);

  Index zero_index() const { return grid.index_of(0.0); }
  // F restricted to [0, x_max].
  RealFunction nonnegative_part() const;
  double half_line_max() const;  // X of the kernel grid, x_max / 2
};

// Output grid [x_neg, 2X] with step h; x_neg, 2X multiples of h.
Grid f_grid(double x_neg, double X, double h);

struct SynthesisOptions {
  int tail_order = 3;           // 0 disables the large-k model
  double tail_fit_from = 0.5;   // fit window [tail_fit_from K, K]
  double tol_imag = 1e-8;
  bool zero_energy_limit = true;  // replace S(0) by its extrapolated limit
};

// F = F_s + F_d with F_s = (1/2pi) int (1-S) e^{ikx} dk and F_d = sum s_j e^{-k_j x}.
FFunction build_F(const ScatteringData& sd, const Grid& out_grid, const SynthesisOptions& opts = {});

struct RecoveryOptions {
  double k_max = 60.0;
  double dk = 0.01;
  double window_fraction = 1.0 / 3.0;  // fit window [x_neg, x_neg (1 - fraction)]
  double tol_zero = 1e-4;       // max|F| on the window relative to max_{x>=0}|F| accepted as J = 0
  double tol_fit = 1e-8;        // relative residual accepted for an exponential model
  double improvement = 1e-2;    // a higher order must cut the residual by this factor
  int max_order = 6;
};

struct RecoveryReport {
  int order = 0;
  std::vector<double> residuals;  // per tried order
  double window_start = 0.0, window_end = 0.0;
};

// F => S: exponentials fitted on the negative-x tail give (k_j, s_j); F_s = F - F_d
// (zero left of the window), and 1 - S(k) = int F_s(x) e^{-ikx} dx.
ScatteringData recover_scattering(const FFunction& F, const RecoveryOptions& opts = {},
                                  RecoveryReport* report = nullptr);

}  // namespace invscat
