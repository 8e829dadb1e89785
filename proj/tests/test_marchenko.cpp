#include <doctest.h>

#include "invscat/pipeline.hpp"
#include "oracles.hpp"

using namespace invscat;

namespace {

FFunction exponential_F(double h = 0.01) {
  Grid g = f_grid(-12, 15, h);
  VectorXd fd(g.size());
  for (Index i = 0; i < g.size(); ++i) fd(i) = 2 * std::exp(-g[i]);
  return FFunction(g, VectorXd::Zero(g.size()), fd);
}

const TransformKernel& oracle_kernel() {
  static const TransformKernel A = solve_marchenko_all(exponential_F());
  return A;
}

}  // namespace

TEST_CASE("degenerate kernel") {
  const TransformKernel& A = oracle_kernel();
  double err = 0;
  for (Index i = 0; i < A.size(); ++i)
    for (Index j = i; j < A.size(); ++j) err = std::max(err, std::abs(A(i, j) - oracle::degenerate_kernel(A.grid[i], A.grid[j])));
  CHECK(err < 1e-4);
  CHECK(std::abs(A(0, 0) + 1.0) < 1e-4);
  VectorXd row0 = solve_marchenko(exponential_F(), 0.0);
  CHECK((row0 - A.row(0)).cwiseAbs().maxCoeff() < 1e-12);
  VectorXd row3 = solve_marchenko(exponential_F(), 3.0);
  CHECK((row3 - A.row(300)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kernel rows vary continuously") {
  const TransformKernel& A = oracle_kernel();
  const double h = A.grid.step();
  // |A_x| <= 2 for the closed form
  for (Index i = 0; i + 1 < A.size(); ++i) {
    double d = 0;
    for (Index j = i + 1; j < A.size(); ++j) d = std::max(d, std::abs(A(i + 1, j) - A(i, j)));
    CHECK(d <= 2 * h);
  }
}

TEST_CASE("potential from the kernel diagonal") {
  Potential q = recover_potential(oracle_kernel());
  const Grid& g = q.grid();
  double err = 0;
  for (Index i = 1; i + 1 < g.size(); ++i) err = std::max(err, std::abs(q.q.values(i) - oracle::sech2_potential(g[i])));
  CHECK(err < 5e-3);
  CHECK(std::abs(q.q.values(0) + 2.0) < 5e-3);
  CHECK_FALSE(q.notes.empty());
}

TEST_CASE("iterative solver agrees with the direct one") {
  // sigma_1F(0) = 0.4 < 1: the Neumann series converges on every row
  Grid g = f_grid(-12, 15, 0.05);
  VectorXd fd(g.size());
  for (Index i = 0; i < g.size(); ++i) fd(i) = 0.4 * std::exp(-g[i]);
  FFunction F(g, VectorXd::Zero(g.size()), fd);
  MarchenkoSolveOptions o;
  o.method = SolveMethod::Iterative;
  TransformKernel it = solve_marchenko_all(F, o);
  TransformKernel dir = solve_marchenko_all(F);
  CHECK((it.values - dir.values).cwiseAbs().maxCoeff() < 1e-9);
  // sigma_1F(0) = 2 for 2 e^{-x}: no contraction at x = 0
  CHECK_THROWS_AS(solve_marchenko(exponential_F(0.05), 0.0, o), ContractionError);
}

TEST_CASE("singular Marchenko operator") {
  // F = -1/X makes I + F_0 rank-one deficient under trapezoid weights
  Grid g = f_grid(-12, 15, 0.05);
  FFunction F(g, VectorXd::Constant(g.size(), -1.0 / 15.0), VectorXd::Zero(g.size()));
  try {
    solve_marchenko_all(F);
    FAIL("expected a singularity error");
  } catch (const SingularityError& e) {
    CHECK(e.row == 0);
  }
}

TEST_CASE("contraction threshold of 2 e^{-x}") {
  FFunction F = exponential_F();
  CHECK(std::abs(contraction_threshold(F) - std::log(2.0) / 2) <= F.grid.step());
}

TEST_CASE("A => F at x = 1 for the oracle pair") {
  const TransformKernel& A = oracle_kernel();
  FixedPointHistory hist;
  RealFunction F = kernel_to_F(A, 1.0, {}, &hist);
  double err = 0;
  for (Index i = 0; i < F.size(); ++i) err = std::max(err, std::abs(F.values(i) - 2 * std::exp(-F.grid[i])));
  CHECK(F.grid.x_min() == doctest::Approx(2.0));
  CHECK(err < 1e-4);
  EstimateProfile ep = profile_F(exponential_F());
  CHECK(hist.observed_ratio <= ep.sigma_1F(200));
  for (size_t k = 1; k < hist.update_norms.size(); ++k) CHECK(hist.update_norms[k] < hist.update_norms[k - 1]);
}

TEST_CASE("inward extension reproduces 2 e^{-z} on [0, 2X]") {
  RealFunction F = recover_F_from_kernel(oracle_kernel(), 0.0);
  double err = 0;
  for (Index i = 0; i < F.size(); ++i) err = std::max(err, std::abs(F.values(i) - 2 * std::exp(-F.grid[i])));
  CHECK(F.grid.x_min() == 0.0);
  CHECK(err < 1e-4);
}

TEST_CASE("threshold guard in A => F") {
  const TransformKernel& A = oracle_kernel();
  double x0 = kernel_contraction_threshold(A);
  CHECK(x0 < 1.0);
  if (x0 > 0) CHECK_THROWS_AS(kernel_to_F(A, 0.0), ContractionError);
}

TEST_CASE("A => F round trip on the -2 sech^2 pipeline") {
  RunConfig c;
  ForwardResult fr = run_forward(potentials::sech2_well(c.potential_grid()), c);
  InverseResult inv = run_inverse(fr.scattering, c);
  RealFunction F_hat = recover_F_from_kernel(inv.kernel, 0.0, c.fixed_point());
  CHECK((F_hat.values - inv.F.nonnegative_part().values).cwiseAbs().maxCoeff() < 1e-3);
}
