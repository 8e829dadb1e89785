#pragma once
#include <optional>
#include <string>
#include <vector>

#include "invscat/numerics.hpp"
#include "invscat/potential.hpp"

namespace invscat {

// Kernel A(x_i, y_j) of the transformation operator on the triangle
// 0 <= x_i <= y_j <= X. Entries below the diagonal are unused and zero.
struct TransformKernel {
  Grid grid;
  Eigen::MatrixXd values;

  TransformKernel() = default;
  TransformKernel(const Grid& g, Eigen::MatrixXd v);

  Index size() const { return grid.size(); }
  double operator()(Index i, Index j) const { return values(i, j); }
  VectorXd diagonal() const { return values.diagonal(); }
  // Row A(x_i, y) for y in [x_i, X].
  VectorXd row(Index i) const { return values.row(i).tail(size() - i).transpose(); }
};

enum class VolterraScheme {
  Picard,   // successive approximation from the first term
  Marching  // Gauss-Seidel sweep in characteristic order; same discrete fixed point
};

struct VolterraOptions {
  VolterraScheme scheme = VolterraScheme::Picard;
  double tol_fixpoint = 1e-12;
  int max_iter = 500;
  // Bound on the mass of |q| beyond X, estimated from the fitted tail decay.
  double truncation_guard = 1e-10;
};

struct VolterraHistory {
  std::vector<double> update_norms;
  int iterations = 0;
};

// Estimated integral of |q| beyond the grid end.
double truncated_tail_mass(const Potential& p);

TransformKernel kernel_from_potential(const Potential& p, const VolterraOptions& opts = {},
                                      VolterraHistory* history = nullptr);

// f(x,k) = e^{ikx} + integral_x^X A(x,y) e^{iky} dy for real k or k = i kappa, kappa > 0.
Complex jost_solution(const TransformKernel& A, double x, Complex k);

// A_x(0, y) on the kernel grid, second order.
VectorXd kernel_x_derivative_at_origin(const TransformKernel& A);

// f'(0,k) = ik - A(0,0) + integral_0^X A_x(0,y) e^{iky} dy.
Complex jost_derivative_at_origin(const TransformKernel& A, Complex k);
Complex jost_derivative_at_origin(const TransformKernel& A, const VectorXd& ax0, Complex k);

struct BoundState {
  double k = 0.0;        // f(ik) = 0, k > 0
  double g_prime = 0.0;  // d/dkappa f(i kappa) at kappa = k
  double fprime0 = 0.0;  // f'(0, ik), real
  double s = 0.0;        // norming constant; 0 until filled
  double s_l2 = 0.0;     // 1 / integral_0^X f(x,ik)^2 dx, independent check

  // df/dk at ik, purely imaginary: -i g'(k)
  Complex fdot() const { return Complex(0.0, -g_prime); }
};

struct JostData {
  Grid k_grid;
  VectorXcd f, fprime0, s;
  std::vector<BoundState> bound_states;
  double f_at_zero = 1.0;
  bool zero_energy_resonance = false;
  std::vector<std::string> warnings;

  Index J() const { return Index(bound_states.size()); }
};

struct JostOptions {
  double eps_zero = 1e-8;              // |f(k)| below this at real k != 0 is fatal
  double resonance_threshold = 1e-6;   // |f(0)| below this flags f(0) = 0
};

// f and f'(0,.) on the full symmetric grid, S = f(-k)/f(k). When f(0) = 0 the
// k = 0 sample of S holds its limit -1.
JostData jost_function(const TransformKernel& A, const Grid& k_grid, const JostOptions& opts = {});

struct BoundStateOptions {
  double kappa_min = 1e-3;
  std::optional<double> kappa_max;  // default 1.1 sqrt(max(0, -min q)) + 0.5
  double scan_step = 0.01;
  double tol_root = 1e-12;
  double derivative_step = 1e-4;
  double eps_degenerate = 1e-10;
  double merge_factor = 10.0;
};

JostData find_bound_states(JostData jd, const TransformKernel& A, const BoundStateOptions& opts = {});

struct NormingOptions {
  double tol_imag = 1e-8;        // relative imaginary residue allowed in s_j
  double oracle_tolerance = 1e-3; // residue vs L2 normalization disagreement that is reported
};

// s_j = -2ik_j / (f'(0,ik_j) fdot(ik_j)), checked against 1/||f(.,ik_j)||^2.
JostData norming_constants(JostData jd, const TransformKernel& A, const NormingOptions& opts = {});

double l2_norming_constant(const TransformKernel& A, double kappa);

// |f'(0,k) f(-k) - f'(0,-k) f(k) - 2ik| per k.
RealFunction wronskian_residual(const JostData& jd);

}  // namespace invscat
