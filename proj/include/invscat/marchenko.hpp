#pragma once
#include <vector>

#include "invscat/forward.hpp"
#include "invscat/potential.hpp"
#include "invscat/scattering.hpp"

namespace invscat {

enum class SolveMethod { Direct, Iterative };

struct MarchenkoSolveOptions {
  double tol_solve = 1e-12;
  double tikhonov = 0.0;  // lambda >= 0; 0 solves the equation as stated
  SolveMethod method = SolveMethod::Direct;
  int max_iter = 2000;
};

struct MarchenkoDiagnostics {
  double condition_estimate = 0.0;  // 1-norm condition estimate of the x = 0 system
  Index fallback_rows = 0;          // rows solved by pivoted LU instead of Cholesky
};

// The kernel grid [0, X] implied by F on [x_neg, 2X].
Grid kernel_grid(const FFunction& F);

// A(x, y_j), y_j in [x, X]: Nystrom discretization of
//   A(x,y) + int_x^X A(x,t) F(t+y) dt = -F(x+y)
// with trapezoid weights.
VectorXd solve_marchenko(const FFunction& F, double x, const MarchenkoSolveOptions& opts = {});

TransformKernel solve_marchenko_all(const FFunction& F, const MarchenkoSolveOptions& opts = {},
                                    MarchenkoDiagnostics* diag = nullptr);

// q = -2 dA(x,x)/dx. The two endpoint samples use one-sided stencils (noted on the result).
Potential recover_potential(const TransformKernel& A);

// Smallest grid x0 >= 0 with sigma_1F(2 x0) < 1.
double contraction_threshold(const FFunction& F);

// Threshold from the kernel alone: C = max |A(x,y)| / sigma((x+y)/2) with sigma
// the tail of |q| recovered from the diagonal; x0 is the smallest grid x with
// 2 C int_x^X sigma < 1.
double kernel_contraction_threshold(const TransformKernel& A);

struct FixedPointOptions {
  double tol = 1e-13;
  int max_iter = 1000;
  bool check_threshold = true;  // require x > kernel_contraction_threshold(A)
};

struct FixedPointHistory {
  std::vector<double> update_norms;
  int iterations = 0;
  double observed_ratio = 0.0;  // median ratio of consecutive update norms
};

// F on [2x, 2X] from the kernel row at x:
//   F(z) + int_z^{2X} A(x, v+x-z) F(v) dv = -A(x, z-x)
// solved by the iteration F <- -A - B F.
RealFunction kernel_to_F(const TransformKernel& A, double x, const FixedPointOptions& opts = {},
                         FixedPointHistory* history = nullptr);

// The same equation at a row x <= x0 with F known on [2 x0, 2X]: on [2x, 2 x0)
// it is a Volterra equation, solved by iteration. Returns F on [2x, 2X].
RealFunction extend_F_inward(const TransformKernel& A, const RealFunction& F_tail, double x,
                             const FixedPointOptions& opts = {}, FixedPointHistory* history = nullptr);

// kernel_to_F just above the kernel threshold, extended inward from row x_row.
RealFunction recover_F_from_kernel(const TransformKernel& A, double x_row = 0.0, const FixedPointOptions& opts = {});

}  // namespace invscat
