#include "invscat/forward.hpp"

#include <algorithm>
#include <cmath>

namespace invscat {

TransformKernel::TransformKernel(const Grid& g, Eigen::MatrixXd v) : grid(g), values(std::move(v)) {
  if (values.rows() != g.size() || values.cols() != g.size())
    throw RangeError("kernel table does not match its grid");
  if (!values.allFinite()) throw DomainError("non-finite kernel entry");
}

namespace {

// q at x_i and at the midpoints, four-point cubic interpolation inside,
// three-point quadratic next to the ends.
VectorXd half_step_samples(const VectorXd& q) {
  const Index n = q.size() - 1;
  VectorXd out(2 * n + 1);
  for (Index i = 0; i <= n; ++i) out(2 * i) = q(i);
  for (Index i = 0; i < n; ++i) {
    double v;
    if (i == 0)
      v = (3 * q(0) + 6 * q(1) - q(2)) / 8;
    else if (i == n - 1)
      v = (3 * q(n) + 6 * q(n - 1) - q(n - 2)) / 8;
    else
      v = (-q(i - 1) + 9 * q(i) + 9 * q(i + 1) - q(i + 2)) / 16;
    out(2 * i + 1) = v;
  }
  return out;
}

inline Index tri(Index m) { return m * (m + 1) / 2; }

}  // namespace

double truncated_tail_mass(const Potential& p) {
  const Grid& g = p.grid();
  const double X = g.x_max();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (Index i = 0; i < g.size(); ++i) {
    double a = std::abs(p.q.values(i));
    if (g[i] < 0.9 * X || g[i] <= 0 || a == 0.0) continue;
    double lx = std::log(g[i]), ly = std::log(a);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++n;
  }
  if (n == 0) return 0.0;
  if (n < 2) return INFINITY;
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope < -1.0)) return INFINITY;
  double at_X = std::exp((sy + slope * (n * std::log(X) - sx)) / n);
  return X * at_X / (-slope - 1.0);
}

// B(u,v) = A(u-v, u+v) solves
//   B(u,v) = 1/2 int_u^X q + int_u^X ds int_0^v dt q(s-t) B(s,t)
// on the lattice u = m d, v = n d (d = h/2, 0 <= n <= m <= 2N). The double
// integral is accumulated with trapezoid sums in t (C) and then in s (G).
TransformKernel kernel_from_potential(const Potential& p, const VolterraOptions& opts,
                                      VolterraHistory* history) {
  const Grid& g = p.grid();
  L11Report l11 = check_L11(p);
  if (!l11.finite)
    throw ClassViolationError("potential fails the x|q| integrability test (tail exponent " +
                              std::to_string(l11.tail.exponent) + ")");
  double mass = truncated_tail_mass(p);
  if (!(mass < opts.truncation_guard))
    throw ClassViolationError("potential mass beyond X estimated at " + std::to_string(mass) +
                              ", above the truncation guard");

  const Index N = g.intervals(), M = 2 * N;
  const double d = g.step() / 2;
  const VectorXd qh = half_step_samples(p.q.values);
  VectorXd st = VectorXd::Zero(M + 1);
  for (Index m = M - 1; m >= 0; --m) st(m) = st(m + 1) + d / 2 * (qh(m) + qh(m + 1));

  std::vector<double> B(tri(M + 1)), Bnew;
  for (Index m = 0; m <= M; ++m)
    for (Index n = 0; n <= m; ++n) B[tri(m) + n] = 0.5 * st(m);

  std::vector<double> C(M + 2), Cnext(M + 2), G(M + 2), Gnext(M + 2), P(M + 2);
  VolterraHistory hist;

  if (opts.scheme == VolterraScheme::Marching) {
    for (Index m = M; m >= 0; --m) {
      for (Index n = 0; n <= m; ++n) {
        double b;
        if (m == M) {
          b = 0.5 * st(m);
          C[n] = n == 0 ? 0.0 : C[n - 1] + d / 2 * (P[n - 1] + qh(m - n) * b);
          G[n] = 0.0;
        } else {
          double base = 0.5 * st(m) + Gnext[n] + d / 2 * Cnext[n];
          if (n == 0) {
            b = base;
            C[0] = 0.0;
          } else {
            double q = qh(m - n);
            b = (base + d / 2 * (C[n - 1] + d / 2 * P[n - 1])) / (1.0 - d * d / 4 * q);
            C[n] = C[n - 1] + d / 2 * (P[n - 1] + q * b);
          }
          G[n] = Gnext[n] + d / 2 * (C[n] + Cnext[n]);
        }
        B[tri(m) + n] = b;
        P[n] = qh(m - n) * b;
      }
      std::swap(C, Cnext);
      std::swap(G, Gnext);
    }
    hist.iterations = 1;
  } else {
    Bnew.resize(B.size());
    bool converged = false;
    for (int it = 1; it <= opts.max_iter; ++it) {
      double update = 0.0;
      for (Index m = M; m >= 0; --m) {
        const double* row = &B[tri(m)];
        double* out = &Bnew[tri(m)];
        for (Index n = 0; n <= m; ++n) P[n] = qh(m - n) * row[n];
        C[0] = 0.0;
        for (Index n = 1; n <= m; ++n) C[n] = C[n - 1] + d / 2 * (P[n - 1] + P[n]);
        for (Index n = 0; n <= m; ++n) {
          G[n] = (m == M) ? 0.0 : Gnext[n] + d / 2 * (C[n] + Cnext[n]);
          out[n] = 0.5 * st(m) + G[n];
          update = std::max(update, std::abs(out[n] - row[n]));
        }
        std::swap(C, Cnext);
        std::swap(G, Gnext);
      }
      std::swap(B, Bnew);
      hist.update_norms.push_back(update);
      hist.iterations = it;
      if (!std::isfinite(update)) break;
      if (update < opts.tol_fixpoint) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      double last = hist.update_norms.empty() ? INFINITY : hist.update_norms.back();
      if (history) *history = hist;
      throw DivergenceError("Volterra iteration did not converge in " + std::to_string(opts.max_iter) +
                                " sweeps; last update " + std::to_string(last),
                            last);
    }
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (Index i = 0; i <= N; ++i)
    for (Index j = i; j <= N; ++j) A(i, j) = B[tri(i + j) + (j - i)];
  if (history) *history = hist;
  return TransformKernel(g, std::move(A));
}

namespace {

void check_k(Complex k) {
  if (k.real() != 0.0 && k.imag() != 0.0) throw DomainError("k must be real or imaginary");
  if (k.real() == 0.0 && k.imag() < 0.0) throw DomainError("imaginary k = i kappa needs kappa > 0");
}

}  // namespace

Complex jost_solution(const TransformKernel& A, double x, Complex k) {
  check_k(k);
  const Index i = A.grid.index_of(x);
  const VectorXd r = A.row(i);
  return std::exp(Complex(0, 1) * k * x) + oscillatory_integral(r, x, A.grid.step(), k);
}

VectorXd kernel_x_derivative_at_origin(const TransformKernel& A) {
  const Index N = A.grid.intervals();
  const double h = A.grid.step();
  const auto& a = A.values;
  VectorXd ax(N + 1);
  for (Index j = 2; j <= N; ++j) ax(j) = (-3 * a(0, j) + 4 * a(1, j) - a(2, j)) / (2 * h);
  // next to the diagonal: derivative along (1,1) minus the y-derivative
  for (Index j = 0; j < 2; ++j) {
    double diag = (-3 * a(0, j) + 4 * a(1, j + 1) - a(2, j + 2)) / (2 * h);
    double dy = j == 0 ? (-3 * a(0, 0) + 4 * a(0, 1) - a(0, 2)) / (2 * h) : (a(0, 2) - a(0, 0)) / (2 * h);
    ax(j) = diag - dy;
  }
  return ax;
}

Complex jost_derivative_at_origin(const TransformKernel& A, const VectorXd& ax0, Complex k) {
  check_k(k);
  return Complex(0, 1) * k - A(0, 0) + oscillatory_integral(ax0, 0.0, A.grid.step(), k);
}

Complex jost_derivative_at_origin(const TransformKernel& A, Complex k) {
  return jost_derivative_at_origin(A, kernel_x_derivative_at_origin(A), k);
}

JostData jost_function(const TransformKernel& A, const Grid& k_grid, const JostOptions& opts) {
  if (!k_grid.symmetric()) throw RangeError("jost_function needs a symmetric k-grid with even interval count");
  const Index nk = k_grid.size(), mid = k_grid.intervals() / 2;
  const double h = A.grid.step();
  const VectorXd row0 = A.row(0);
  const VectorXd ax0 = kernel_x_derivative_at_origin(A);

  JostData jd;
  jd.k_grid = k_grid;
  jd.f.resize(nk);
  jd.fprime0.resize(nk);
  jd.s.resize(nk);
  for (Index j = mid; j < nk; ++j) {
    double k = j == mid ? 0.0 : k_grid[j];
    Complex f = 1.0 + oscillatory_integral(row0, 0.0, h, k);
    Complex fp = Complex(0, k) - A(0, 0) + oscillatory_integral(ax0, 0.0, h, k);
    if (j == mid) {
      f = f.real();
      fp = fp.real();
    }
    jd.f(j) = f;
    jd.fprime0(j) = fp;
    jd.f(2 * mid - j) = std::conj(f);
    jd.fprime0(2 * mid - j) = std::conj(fp);
  }
  jd.f_at_zero = jd.f(mid).real();
  jd.zero_energy_resonance = std::abs(jd.f_at_zero) < opts.resonance_threshold;
  for (Index j = 0; j < nk; ++j) {
    if (j == mid) {
      jd.s(j) = jd.zero_energy_resonance ? -1.0 : 1.0;
      continue;
    }
    if (std::abs(jd.f(j)) < opts.eps_zero)
      throw NearZeroJostError("|f(k)| = " + std::to_string(std::abs(jd.f(j))) + " at k = " +
                              std::to_string(k_grid[j]));
    jd.s(j) = std::conj(jd.f(j)) / jd.f(j);
  }
  if (jd.zero_energy_resonance)
    jd.warnings.push_back("f(0) = " + std::to_string(jd.f_at_zero) + " treated as zero; S(0) set to its limit -1");
  return jd;
}

JostData find_bound_states(JostData jd, const TransformKernel& A, const BoundStateOptions& opts) {
  const double h = A.grid.step();
  const VectorXd row0 = A.row(0);
  const VectorXd ax0 = kernel_x_derivative_at_origin(A);
  auto g = [&](double kappa) { return 1.0 + oscillatory_integral(row0, 0.0, h, Complex(0, kappa)).real(); };

  double kappa_max;
  if (opts.kappa_max) {
    kappa_max = *opts.kappa_max;
  } else {
    RealFunction diag(A.grid, A.diagonal());
    double qmin = (-2.0 * differentiate(diag).values).minCoeff();
    kappa_max = 1.1 * std::sqrt(std::max(0.0, -qmin)) + 0.5;
  }

  std::vector<double> roots;
  double a = opts.kappa_min, ga = g(a);
  if (std::abs(jd.f_at_zero) > 1e-6 && ga * jd.f_at_zero < 0)
    jd.warnings.push_back("sign change of f(i kappa) below kappa_min; a root there is not resolved");
  while (a < kappa_max) {
    double b = std::min(a + opts.scan_step, kappa_max), gb = g(b);
    if (ga == 0.0) {
      roots.push_back(a);
    } else if (ga * gb < 0.0) {
      double lo = a, hi = b, glo = ga;
      while (hi - lo > opts.tol_root) {
        double mid = 0.5 * (lo + hi), gm = g(mid);
        if (gm == 0.0) { lo = hi = mid; break; }
        if ((gm < 0) == (glo < 0)) { lo = mid; glo = gm; } else { hi = mid; }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    ga = gb;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  std::vector<double> merged;
  for (double r : roots)
    if (merged.empty() || merged.back() - r > opts.merge_factor * opts.tol_root) merged.push_back(r);

  jd.bound_states.clear();
  for (double kappa : merged) {
    BoundState bs;
    bs.k = kappa;
    double e = opts.derivative_step;
    bs.g_prime = (g(kappa + e) - g(kappa - e)) / (2 * e);
    if (std::abs(bs.g_prime) < opts.eps_degenerate)
      throw DegenerateZeroError("f has a degenerate zero at k = i*" + std::to_string(kappa));
    bs.fprime0 = jost_derivative_at_origin(A, ax0, Complex(0, kappa)).real();
    jd.bound_states.push_back(bs);
  }
  return jd;
}

double l2_norming_constant(const TransformKernel& A, double kappa) {
  const Grid& g = A.grid;
  VectorXd f2(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    double f = jost_solution(A, g[i], Complex(0, kappa)).real();
    f2(i) = f * f;
  }
  return 1.0 / integrate(RealFunction(g, f2));
}

JostData norming_constants(JostData jd, const TransformKernel& A, const NormingOptions& opts) {
  for (auto& bs : jd.bound_states) {
    Complex s = Complex(0, -2.0 * bs.k) / (Complex(bs.fprime0) * bs.fdot());
    if (std::abs(s.imag()) > opts.tol_imag * std::abs(s))
      throw InconsistentDataError("norming constant has imaginary part " + std::to_string(s.imag()));
    if (!(s.real() > 0))
      throw InconsistentDataError("non-positive norming constant " + std::to_string(s.real()) + " at k = " +
                                  std::to_string(bs.k));
    bs.s = s.real();
    bs.s_l2 = l2_norming_constant(A, bs.k);
    double rel = std::abs(bs.s - bs.s_l2) / bs.s_l2;
    if (rel > opts.oracle_tolerance)
      jd.warnings.push_back("norming constant at k = " + std::to_string(bs.k) + ": residue " +
                            std::to_string(bs.s) + " vs L2 normalization " + std::to_string(bs.s_l2));
  }
  return jd;
}

RealFunction wronskian_residual(const JostData& jd) {
  const Index nk = jd.k_grid.size();
  VectorXd r(nk);
  for (Index j = 0; j < nk; ++j) {
    Index jm = nk - 1 - j;
    double k = jd.k_grid[j];
    Complex w = jd.fprime0(j) * jd.f(jm) - jd.fprime0(jm) * jd.f(j) - Complex(0, 2 * k);
    r(j) = std::abs(w);
  }
  return RealFunction(jd.k_grid, r);
}

}  // namespace invscat
