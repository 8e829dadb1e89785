#pragma once
#include <map>
#include <string>
#include <vector>

#include "invscat/forward.hpp"
#include "invscat/numerics.hpp"
#include "invscat/report.hpp"
#include "invscat/scattering.hpp"

namespace invscat {

// F-side profiles live on f_grid = [0, 2X]; A-side profiles on a_grid = [0, X].
// Both grids share the step, so sigma_F(2 x_i) is sigma_F(2i).
struct EstimateProfile {
  Grid f_grid, a_grid;
  VectorXd sigma_F, sigma_1F, sigma_2F;
  VectorXd sigma_A, sigma_1A, norm_Ax_1, norm_Ay_1;
  double x0 = 0.0;
  std::map<std::string, double> fitted_constants;

  bool has_F() const { return sigma_F.size() > 0; }
  bool has_A() const { return sigma_A.size() > 0; }
};

EstimateProfile profile_F(const FFunction& F);
EstimateProfile profile_A(const TransformKernel& A);
// F-side fields from the first argument, A-side fields from the second.
EstimateProfile merge_profiles(const EstimateProfile& f_side, const EstimateProfile& a_side);

// A_x and A_y on the kernel triangle (second-order differences along rows and diagonals).
struct KernelDerivatives {
  Eigen::MatrixXd ax, ay;
};
KernelDerivatives kernel_derivatives(const TransformKernel& A);

struct FittedConstant {
  std::string name;
  double value = 0.0;   // max ratio over used points, 0 when none are used
  double at_x = 0.0;    // location of the maximum
  Index used = 0, excluded = 0;
  std::vector<double> suspect_x;  // excluded points whose numerator is not small
};

struct InequalityReport {
  double x0 = 0.0;
  std::vector<FittedConstant> constants;
  bool all_finite() const;
};

// Fitted constants c* = max_{x >= x0} numerator / denominator for the bounds
// sigma_A <= c sigma_F(2x), sigma_1A <= c sigma_1F(2x),
// ||A_y||_1 <= c sigma_2F(2x)(1 + sigma_1F(2x)), ||A_x||_1 <= c [sigma_2F(2x) + sigma_1F(2x) sigma_F(2x)]
// and the converse bounds sigma_F(2x) <= c sigma_A, sigma_1F(2x) <= c sigma_1A,
// sigma_2F(2x) <= c [sigma_A sigma_1A + ||A_x||_1 (1 + sigma_1A)].
// Points whose denominator is below `exclusion` times its maximum are skipped.
InequalityReport check_sigma_estimates(EstimateProfile& ep, double exclusion = 1e-12);

struct IntegrabilityEntry {
  std::string name;
  double value = 0.0;
  TailVerdict tail;
  bool finite = true;
};

struct ConditionCOptions {
  double max_exponent = -2.0;
  double negligible = 1e-12;
};

struct ConditionCReport {
  std::vector<IntegrabilityEntry> entries;  // ||F||_1, ||F||_inf, int x|F'|, int sigma_F
  bool passed() const;
};
ConditionCReport check_condition_C(const FFunction& F, const ConditionCOptions& opts = {});

struct CompactSupportReport {
  double a = 0.0, delta = 0.0;
  double max_abs = 0.0;     // max |F| on [2a(1+delta), 2X]
  double threshold = 0.0;   // tol times max_{x>=0} |F|
  double a_hat = 0.0;       // half the last x with |F| above threshold
  bool pass = true;
};
// `tol` is relative to max_{x >= 0} |F|.
CompactSupportReport check_compact_support(const FFunction& F, double a, double tol = 1e-5, double delta = 0.05);

struct L2Report {
  std::vector<IntegrabilityEntry> entries;
  std::vector<VectorXcd> functions;  // the three k-functions on the k-grid
  bool passed() const;
};
// 2ik[f-1+Q/(2ik)], k[1-S+Q/(ik)], k[|f|^2-1]: truncated L2 norm and tail verdict.
L2Report check_L2_conditions(const JostData& jd, double Q, double max_exponent = -0.75, double negligible = 1e-12);

}  // namespace invscat
