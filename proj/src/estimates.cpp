#include "invscat/estimates.hpp"

#include <algorithm>
#include <cmath>

namespace invscat {

namespace {

// Five-point differences, one-sided at the two points nearest each end.
VectorXd derivative_4(const VectorXd& v, double h) {
  const Index n = v.size() - 1;
  VectorXd d(n + 1);
  for (Index i = 2; i + 2 <= n; ++i) d(i) = (v(i - 2) - 8 * v(i - 1) + 8 * v(i + 1) - v(i + 2)) / (12 * h);
  d(0) = (-25 * v(0) + 48 * v(1) - 36 * v(2) + 16 * v(3) - 3 * v(4)) / (12 * h);
  d(1) = (-3 * v(0) - 10 * v(1) + 18 * v(2) - 6 * v(3) + v(4)) / (12 * h);
  d(n) = (25 * v(n) - 48 * v(n - 1) + 36 * v(n - 2) - 16 * v(n - 3) + 3 * v(n - 4)) / (12 * h);
  d(n - 1) = (3 * v(n) + 10 * v(n - 1) - 18 * v(n - 2) + 6 * v(n - 3) - v(n - 4)) / (12 * h);
  return d;
}

}  // namespace

EstimateProfile profile_F(const FFunction& F) {
  RealFunction Fp = F.nonnegative_part();
  const Grid& g = Fp.grid;
  if (g.intervals() % 2 != 0) throw RangeError("F must extend to 2X with X on the grid");
  const double h = g.step();
  EstimateProfile ep;
  ep.f_grid = g;
  ep.a_grid = Grid(0.0, g.x_max() / 2, g.intervals() / 2);
  ep.sigma_F = running_max_from_right(Fp.values);
  ep.sigma_1F = tail_integral(ep.sigma_F, h, true);
  ep.sigma_2F = tail_integral(derivative_4(Fp.values, h).cwiseAbs(), h, true);
  ep.x0 = ep.a_grid.x_max();
  for (Index i = 0; i < ep.a_grid.size(); ++i)
    if (ep.sigma_1F(2 * i) < 1.0) {
      ep.x0 = ep.a_grid[i];
      break;
    }
  return ep;
}

namespace {

// d/ds of samples taken with spacing h along a line
VectorXd line_derivative(const VectorXd& v, double h) {
  const Index L = v.size();
  VectorXd d = VectorXd::Zero(L);
  if (L == 2) d.setConstant((v(1) - v(0)) / h);
  if (L < 3) return d;
  for (Index k = 1; k + 1 < L; ++k) d(k) = (v(k + 1) - v(k - 1)) / (2 * h);
  d(0) = (-3 * v(0) + 4 * v(1) - v(2)) / (2 * h);
  d(L - 1) = (3 * v(L - 1) - 4 * v(L - 2) + v(L - 3)) / (2 * h);
  return d;
}

double row_l1(const VectorXd& v, double h) {
  if (v.size() < 2) return 0.0;
  return tail_integral(v.cwiseAbs(), h, true)(0);
}

}  // namespace

KernelDerivatives kernel_derivatives(const TransformKernel& A) {
  const Index N = A.grid.intervals();
  const double h = A.grid.step();
  KernelDerivatives kd;
  kd.ay = Eigen::MatrixXd::Zero(N + 1, N + 1);
  kd.ax = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (Index i = 0; i <= N; ++i) kd.ay.row(i).tail(N + 1 - i) = line_derivative(A.row(i), h).transpose();
  // along the diagonal direction (1,1): A_x + A_y
  for (Index off = 0; off <= N; ++off) {
    const Index L = N - off + 1;
    VectorXd v(L);
    for (Index k = 0; k < L; ++k) v(k) = A(k, k + off);
    VectorXd d = line_derivative(v, h);
    for (Index k = 0; k < L; ++k) kd.ax(k, k + off) = d(k) - kd.ay(k, k + off);
  }
  return kd;
}

EstimateProfile profile_A(const TransformKernel& A) {
  const Index N = A.grid.intervals();
  const double h = A.grid.step();
  EstimateProfile ep;
  ep.a_grid = A.grid;
  ep.sigma_A.resize(N + 1);
  ep.sigma_1A.resize(N + 1);
  ep.norm_Ax_1.resize(N + 1);
  ep.norm_Ay_1.resize(N + 1);
  KernelDerivatives kd = kernel_derivatives(A);
  for (Index i = 0; i <= N; ++i) {
    VectorXd r = A.row(i);
    ep.sigma_A(i) = r.cwiseAbs().maxCoeff();
    ep.sigma_1A(i) = row_l1(r, h);
    ep.norm_Ax_1(i) = row_l1(kd.ax.row(i).tail(N + 1 - i).transpose(), h);
    ep.norm_Ay_1(i) = row_l1(kd.ay.row(i).tail(N + 1 - i).transpose(), h);
  }
  return ep;
}

EstimateProfile merge_profiles(const EstimateProfile& f_side, const EstimateProfile& a_side) {
  if (!f_side.has_F() || !a_side.has_A()) throw RangeError("profiles lack the F side or the A side");
  if (!(f_side.a_grid == a_side.a_grid)) throw RangeError("F and A profiles are on different grids");
  EstimateProfile ep = f_side;
  ep.sigma_A = a_side.sigma_A;
  ep.sigma_1A = a_side.sigma_1A;
  ep.norm_Ax_1 = a_side.norm_Ax_1;
  ep.norm_Ay_1 = a_side.norm_Ay_1;
  return ep;
}

bool InequalityReport::all_finite() const {
  for (const auto& c : constants)
    if (!std::isfinite(c.value)) return false;
  return true;
}

InequalityReport check_sigma_estimates(EstimateProfile& ep, double exclusion) {
  if (!ep.has_F() || !ep.has_A()) throw RangeError("inequality check needs both profile halves");
  const Grid& g = ep.a_grid;
  const Index N = g.intervals();
  const Index i0 = g.index_of(std::min(ep.x0, g.x_max()));
  const Index m = N - i0 + 1;

  VectorXd sF(m), s1F(m), s2F(m), sA(m), s1A(m), nAx(m), nAy(m);
  for (Index k = 0; k < m; ++k) {
    Index i = i0 + k;
    sF(k) = ep.sigma_F(2 * i);
    s1F(k) = ep.sigma_1F(2 * i);
    s2F(k) = ep.sigma_2F(2 * i);
    sA(k) = ep.sigma_A(i);
    s1A(k) = ep.sigma_1A(i);
    nAx(k) = ep.norm_Ax_1(i);
    nAy(k) = ep.norm_Ay_1(i);
  }
  auto ones = VectorXd::Ones(m);
  struct Pair {
    const char* name;
    VectorXd num, den;
  };
  std::vector<Pair> pairs = {
      {"sigma_A <= c sigma_F(2x)", sA, sF},
      {"sigma_1A <= c sigma_1F(2x)", s1A, s1F},
      {"||A_y||_1 <= c sigma_2F(2x)(1+sigma_1F(2x))", nAy, s2F.cwiseProduct(ones + s1F)},
      {"||A_x||_1 <= c [sigma_2F(2x)+sigma_1F(2x)sigma_F(2x)]", nAx, s2F + s1F.cwiseProduct(sF)},
      {"sigma_F(2x) <= c sigma_A", sF, sA},
      {"sigma_1F(2x) <= c sigma_1A", s1F, s1A},
      {"sigma_2F(2x) <= c [sigma_A sigma_1A + ||A_x||_1(1+sigma_1A)]", s2F,
       sA.cwiseProduct(s1A) + nAx.cwiseProduct(ones + s1A)},
  };

  InequalityReport rep;
  rep.x0 = g[i0];
  for (const auto& p : pairs) {
    FittedConstant fc;
    fc.name = p.name;
    const double dmax = p.den.maxCoeff(), nmax = p.num.maxCoeff();
    for (Index k = 0; k < m; ++k) {
      if (!(p.den(k) > exclusion * dmax) || dmax == 0.0) {
        ++fc.excluded;
        if (p.num(k) > exclusion * std::max(nmax, 1e-300) && nmax > 0) fc.suspect_x.push_back(g[i0 + k]);
        continue;
      }
      ++fc.used;
      double r = p.num(k) / p.den(k);
      if (r > fc.value) {
        fc.value = r;
        fc.at_x = g[i0 + k];
      }
    }
    ep.fitted_constants[fc.name] = fc.value;
    rep.constants.push_back(std::move(fc));
  }
  return rep;
}

bool ConditionCReport::passed() const {
  for (const auto& e : entries)
    if (!e.finite) return false;
  return true;
}

ConditionCReport check_condition_C(const FFunction& F, const ConditionCOptions& opts) {
  RealFunction Fp = F.nonnegative_part();
  const Grid& g = Fp.grid;
  const double h = g.step();
  VectorXd absF = Fp.values.cwiseAbs();
  VectorXd xdF = g.points().cwiseProduct(differentiate(Fp).values.cwiseAbs());
  VectorXd sF = running_max_from_right(Fp.values);
  ConditionCReport rep;
  auto entry = [&](const char* name, const VectorXd& integrand) {
    IntegrabilityEntry e;
    e.name = name;
    e.value = tail_integral(integrand, h, true)(0);
    e.tail = tail_decay_verdict(g, integrand, opts.max_exponent, opts.negligible);
    e.finite = e.tail.finite;
    return e;
  };
  rep.entries.push_back(entry("||F||_1", absF));
  IntegrabilityEntry sup;
  sup.name = "||F||_inf";
  sup.value = absF.maxCoeff();
  sup.tail.basis = "finite samples";
  sup.finite = std::isfinite(sup.value);
  rep.entries.push_back(sup);
  rep.entries.push_back(entry("int x|F'|", xdF));
  rep.entries.push_back(entry("int sigma_F", sF));
  return rep;
}

CompactSupportReport check_compact_support(const FFunction& F, double a, double tol, double delta) {
  RealFunction Fp = F.nonnegative_part();
  const Grid& g = Fp.grid;
  CompactSupportReport r;
  r.a = a;
  r.delta = delta;
  const double start = 2 * a * (1 + delta);
  if (!(a >= 0) || start > g.x_max()) throw RangeError("F grid does not extend past 2a(1+delta)");
  const double scale = Fp.values.cwiseAbs().maxCoeff();
  r.threshold = tol * scale;
  for (Index i = 0; i < g.size(); ++i) {
    double v = std::abs(Fp.values(i));
    if (g[i] >= start - 1e-9 * g.step()) r.max_abs = std::max(r.max_abs, v);
    if (v > r.threshold) r.a_hat = g[i] / 2;
  }
  r.pass = r.max_abs <= r.threshold;
  return r;
}

bool L2Report::passed() const {
  for (const auto& e : entries)
    if (!e.finite) return false;
  return true;
}

L2Report check_L2_conditions(const JostData& jd, double Q, double max_exponent, double negligible) {
  const Grid& kg = jd.k_grid;
  const Index nk = kg.size(), mid = kg.intervals() / 2;
  VectorXcd g1(nk), g2(nk), g3(nk);
  for (Index j = 0; j < nk; ++j) {
    double k = j == mid ? 0.0 : kg[j];
    Complex f = jd.f(j);
    g1(j) = Complex(0, 2 * k) * (f - 1.0) + Q;
    g2(j) = k * (1.0 - jd.s(j)) - Complex(0, Q);
    g3(j) = k * (std::norm(f) - 1.0);
  }
  L2Report rep;
  rep.functions = {g1, g2, g3};
  const char* names[] = {"2ik[f-1+Q/(2ik)]", "k[1-S+Q/(ik)]", "k[|f|^2-1]"};
  const Grid half(0.0, kg.x_max(), kg.intervals() / 2);
  for (int t = 0; t < 3; ++t) {
    const VectorXcd& fn = rep.functions[t];
    IntegrabilityEntry e;
    e.name = names[t];
    e.value = std::sqrt(integrate(RealFunction(kg, fn.cwiseAbs2())));
    VectorXd tail = fn.tail(nk - mid).cwiseAbs();
    e.tail = tail_decay_verdict(half, tail, max_exponent, negligible);
    e.finite = e.tail.finite;
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace invscat
