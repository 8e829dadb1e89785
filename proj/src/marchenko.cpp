#include "invscat/marchenko.hpp"

#include <algorithm>
#include <cmath>

#include "invscat/estimates.hpp"

namespace invscat {

Grid kernel_grid(const FFunction& F) {
  const Index n = F.grid.intervals() - F.zero_index();
  if (n % 2 != 0) throw RangeError("F must extend to 2X with X on the grid");
  return Grid(0.0, F.grid.x_max() / 2, n / 2);
}

namespace {

// Hankel samples F(x_j + x_m) = Fpos(j + m) on the kernel grid.
VectorXd positive_samples(const FFunction& F) {
  const Index i0 = F.zero_index();
  return F.values.tail(F.grid.size() - i0);
}

Eigen::MatrixXd hankel(const VectorXd& fpos, Index N) {
  Eigen::MatrixXd H(N + 1, N + 1);
  for (Index j = 0; j <= N; ++j)
    for (Index m = 0; m <= N; ++m) H(j, m) = fpos(j + m);
  return H;
}

// Row i of the Nystrom system M a = r with M = I + H W, trapezoid weights on [x_i, X].
void row_system(const Eigen::MatrixXd& H, const VectorXd& fpos, Index i, double h, Eigen::MatrixXd& M,
                VectorXd& r) {
  const Index N = H.rows() - 1, n = N - i + 1;
  VectorXd w = VectorXd::Constant(n, h);
  w(0) = h / 2;
  w(n - 1) = h / 2;
  if (n == 1) w(0) = 0.0;
  M = H.block(i, i, n, n) * w.asDiagonal();
  M.diagonal().array() += 1.0;
  r.resize(n);
  for (Index j = 0; j < n; ++j) r(j) = -fpos(2 * i + j);
}

VectorXd solve_row_dense(const Eigen::MatrixXd& M, const VectorXd& r, const MarchenkoSolveOptions& opts, Index row) {
  if (opts.tikhonov > 0) {
    Eigen::MatrixXd N = M.transpose() * M;
    N.diagonal().array() += opts.tikhonov;
    return N.ldlt().solve(M.transpose() * r);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  if (!(lu.rcond() > 1e-14)) throw SingularityError("Marchenko system singular at row " + std::to_string(row), row);
  return lu.solve(r);
}

VectorXd solve_row_iterative(const Eigen::MatrixXd& M, const VectorXd& r, const MarchenkoSolveOptions& opts,
                             Index row) {
  // a <- r - (M - I) a
  VectorXd a = r, prev_step;
  double last = INFINITY;
  int rises = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    VectorXd next = r - (M * a - a);
    double upd = (next - a).cwiseAbs().maxCoeff();
    a = std::move(next);
    if (upd < opts.tol_solve) return a;
    rises = upd > last ? rises + 1 : 0;
    if (rises >= 2 || !std::isfinite(upd))
      throw ContractionError("Marchenko iteration diverges at row " + std::to_string(row));
    last = upd;
  }
  throw IterationCapError("Marchenko iteration hit the cap at row " + std::to_string(row));
}

}  // namespace

VectorXd solve_marchenko(const FFunction& F, double x, const MarchenkoSolveOptions& opts) {
  const Grid kg = kernel_grid(F);
  const Index N = kg.intervals(), i = kg.index_of(x);
  const VectorXd fpos = positive_samples(F);
  const Eigen::MatrixXd H = hankel(fpos, N);
  Eigen::MatrixXd M;
  VectorXd r;
  row_system(H, fpos, i, kg.step(), M, r);
  return opts.method == SolveMethod::Iterative ? solve_row_iterative(M, r, opts, i) : solve_row_dense(M, r, opts, i);
}

// With base weights (h, ..., h, h/2) the system of every row is the trailing
// block of one symmetric matrix G = I + D H D, D = sqrt(weights). Factoring G
// with rows and columns reversed makes each trailing block a leading block of
// the same Cholesky factor; the half weight at the first point of each row is
// a rank-one correction applied by Sherman-Morrison.
TransformKernel solve_marchenko_all(const FFunction& F, const MarchenkoSolveOptions& opts,
                                    MarchenkoDiagnostics* diag) {
  const Grid kg = kernel_grid(F);
  const Index N = kg.intervals();
  const double h = kg.step();
  const VectorXd fpos = positive_samples(F);
  const Eigen::MatrixXd H = hankel(fpos, N);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 1, N + 1);
  MarchenkoDiagnostics dg;

  {
    Eigen::MatrixXd M;
    VectorXd r;
    row_system(H, fpos, 0, h, M, r);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    dg.condition_estimate = 1.0 / lu.rcond();
  }
  if (!std::isfinite(dg.condition_estimate) || dg.condition_estimate > 1e14)
    throw SingularityError("Marchenko system singular at x = 0", 0);

  if (opts.method == SolveMethod::Iterative || opts.tikhonov > 0) {
    for (Index i = 0; i <= N; ++i) {
      Eigen::MatrixXd M;
      VectorXd r;
      row_system(H, fpos, i, h, M, r);
      VectorXd a = opts.method == SolveMethod::Iterative ? solve_row_iterative(M, r, opts, i)
                                                         : solve_row_dense(M, r, opts, i);
      A.row(i).tail(N + 1 - i) = a.transpose();
    }
    if (diag) *diag = dg;
    return TransformKernel(kg, std::move(A));
  }

  VectorXd d = VectorXd::Constant(N + 1, std::sqrt(h));
  d(N) = std::sqrt(h / 2);
  Eigen::MatrixXd Gr(N + 1, N + 1);
  for (Index j = 0; j <= N; ++j)
    for (Index m = 0; m <= N; ++m) Gr(N - j, N - m) = (j == m ? 1.0 : 0.0) + d(j) * H(j, m) * d(m);
  Eigen::LLT<Eigen::MatrixXd> llt(Gr);
  const bool factored = llt.info() == Eigen::Success;
  const Eigen::MatrixXd L = factored ? Eigen::MatrixXd(llt.matrixL()) : Eigen::MatrixXd();

  auto solve_base = [&](Index i, const VectorXd& rhs) {
    const Index n = N - i + 1;
    VectorXd b = d.tail(n).cwiseProduct(rhs).reverse();
    auto Ln = L.topLeftCorner(n, n);
    Ln.triangularView<Eigen::Lower>().solveInPlace(b);
    Ln.transpose().triangularView<Eigen::Upper>().solveInPlace(b);
    return VectorXd(b.reverse().cwiseQuotient(d.tail(n)));
  };

  for (Index i = 0; i <= N; ++i) {
    const Index n = N - i + 1;
    VectorXd r(n);
    for (Index j = 0; j < n; ++j) r(j) = -fpos(2 * i + j);
    VectorXd a;
    bool ok = factored;
    if (ok && n == 1) {
      a = r;  // zero-length integration interval
    } else if (ok) {
      a = solve_base(i, r);
      VectorXd u = -(h / 2) * H.col(i).tail(n);
      VectorXd zu = solve_base(i, u);
      double denom = 1.0 + zu(0);
      if (std::abs(denom) < 1e-12) ok = false;
      else a -= zu * (a(0) / denom);
      if (!a.allFinite()) ok = false;
    }
    if (!ok) {
      Eigen::MatrixXd M;
      VectorXd rr;
      row_system(H, fpos, i, h, M, rr);
      a = solve_row_dense(M, rr, opts, i);
      ++dg.fallback_rows;
    }
    A.row(i).tail(n) = a.transpose();
  }
  if (diag) *diag = dg;
  return TransformKernel(kg, std::move(A));
}

Potential recover_potential(const TransformKernel& A) {
  RealFunction diag(A.grid, A.diagonal());
  RealFunction q = differentiate(diag);
  q.values *= -2.0;
  Potential p(std::move(q), {}, "recovered");
  p.notes.push_back("q(0) and q(X) use one-sided difference stencils (lower accuracy)");
  return p;
}

double contraction_threshold(const FFunction& F) {
  EstimateProfile ep = profile_F(F);
  const Index N = ep.a_grid.intervals();
  for (Index i = 0; i <= N; ++i)
    if (ep.sigma_1F(2 * i) < 1.0) return ep.a_grid[i];
  throw ThresholdNotFoundError("sigma_1F(2x) >= 1 on the whole grid");
}

namespace {

// sigma at half-integer index t/2 of the kernel grid
double sigma_half(const VectorXd& sigma, Index twice) {
  return twice % 2 == 0 ? sigma(twice / 2) : 0.5 * (sigma(twice / 2) + sigma(twice / 2 + 1));
}

}  // namespace

double kernel_contraction_threshold(const TransformKernel& A) {
  const Grid& g = A.grid;
  const Index N = g.intervals();
  const double h = g.step();
  Potential q = recover_potential(A);
  VectorXd sigma = sigma_q(q).values;
  const double smax = sigma.maxCoeff();
  if (smax == 0.0) return 0.0;
  double C = 0.0;
  for (Index i = 0; i <= N; ++i)
    for (Index j = i; j <= N; ++j) {
      double s = sigma_half(sigma, i + j);
      if (s < 1e-12 * smax) continue;
      C = std::max(C, std::abs(A(i, j)) / s);
    }
  VectorXd tail = tail_integral(sigma, h, true);
  for (Index i = 0; i <= N; ++i)
    if (2 * C * tail(i) < 1.0) return g[i];
  throw ThresholdNotFoundError("kernel bound 2C int sigma >= 1 on the whole grid");
}

namespace {

// (B F)(z_p) = int_{z_p}^{2X} A(x, v + x - z_p) F(v) dv, trapezoid in v over the
// part where the kernel argument stays in [x, X].
double apply_row_operator(const TransformKernel& A, Index i, const VectorXd& Fv, Index p) {
  const Index N = A.grid.intervals(), P = Fv.size() - 1;
  const double h = A.grid.step();
  const Index qmax = std::min(P, p + (N - i));
  if (qmax == p) return 0.0;
  double s = 0.5 * (A(i, i) * Fv(p) + A(i, i + qmax - p) * Fv(qmax));
  for (Index q = p + 1; q < qmax; ++q) s += A(i, i + q - p) * Fv(q);
  return h * s;
}

double rhs_at(const TransformKernel& A, Index i, Index p) {
  const Index N = A.grid.intervals();
  return i + p <= N ? -A(i, i + p) : 0.0;
}

void finish_history(FixedPointHistory& h) {
  std::vector<double> ratios;
  for (size_t k = 1; k < h.update_norms.size(); ++k)
    if (h.update_norms[k - 1] > 1e-13) ratios.push_back(h.update_norms[k] / h.update_norms[k - 1]);
  if (!ratios.empty()) {
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    h.observed_ratio = ratios[ratios.size() / 2];
  }
}

}  // namespace

RealFunction kernel_to_F(const TransformKernel& A, double x, const FixedPointOptions& opts,
                         FixedPointHistory* history) {
  const Grid& g = A.grid;
  const Index N = g.intervals(), i = g.index_of(x);
  if (opts.check_threshold) {
    double x0 = kernel_contraction_threshold(A);
    if (!(x > x0)) throw ContractionError("row x = " + std::to_string(x) + " is not beyond the kernel threshold " +
                                          std::to_string(x0));
  }
  const Index P = 2 * (N - i);
  if (P < 8) throw RangeError("kernel_to_F needs x at least 4 steps below X");
  VectorXd rhs(P + 1);
  for (Index p = 0; p <= P; ++p) rhs(p) = rhs_at(A, i, p);
  VectorXd Fv = rhs, next(P + 1);
  FixedPointHistory hist;
  int rises = 0;
  bool converged = false;
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (Index p = 0; p <= P; ++p) next(p) = rhs(p) - apply_row_operator(A, i, Fv, p);
    double upd = (next - Fv).cwiseAbs().maxCoeff();
    Fv.swap(next);
    if (!hist.update_norms.empty() && upd > hist.update_norms.back()) ++rises;
    else rises = 0;
    hist.update_norms.push_back(upd);
    hist.iterations = it;
    if (upd < opts.tol) {
      converged = true;
      break;
    }
    if (rises >= 2 || !std::isfinite(upd)) {
      finish_history(hist);
      if (history) *history = hist;
      throw ContractionError("fixed-point iteration for F diverges at x = " + std::to_string(x));
    }
  }
  finish_history(hist);
  if (history) *history = hist;
  if (!converged) throw IterationCapError("fixed-point iteration for F hit the cap");
  return RealFunction(Grid(2 * x, 2 * g.x_max(), P), std::move(Fv));
}

RealFunction extend_F_inward(const TransformKernel& A, const RealFunction& F_tail, double x,
                             const FixedPointOptions& opts, FixedPointHistory* history) {
  const Grid& g = A.grid;
  const Index N = g.intervals(), i = g.index_of(x);
  const double h = g.step();
  if (std::abs(F_tail.grid.step() - h) > 1e-12 * h || std::abs(F_tail.grid.x_max() - 2 * g.x_max()) > 1e-9 * h)
    throw RangeError("F tail must share the kernel step and end at 2X");
  const Index P = 2 * (N - i);
  const Index known = Index(std::llround((F_tail.grid.x_min() - 2 * x) / h));
  if (known < 0) throw RangeError("row x lies beyond the start of the known F tail");
  VectorXd Fv = VectorXd::Zero(P + 1);
  Fv.tail(P + 1 - known) = F_tail.values;
  if (known == 0) return RealFunction(Grid(2 * x, 2 * g.x_max(), P), std::move(Fv));

  VectorXd next = Fv;
  FixedPointHistory hist;
  bool converged = false;
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (Index p = 0; p < known; ++p) next(p) = rhs_at(A, i, p) - apply_row_operator(A, i, Fv, p);
    double upd = (next.head(known) - Fv.head(known)).cwiseAbs().maxCoeff();
    Fv.head(known) = next.head(known);
    hist.update_norms.push_back(upd);
    hist.iterations = it;
    if (upd < opts.tol) {
      converged = true;
      break;
    }
  }
  finish_history(hist);
  if (history) *history = hist;
  if (!converged) throw IterationCapError("Volterra iteration for F on the inner range hit the cap");
  return RealFunction(Grid(2 * x, 2 * g.x_max(), P), std::move(Fv));
}

RealFunction recover_F_from_kernel(const TransformKernel& A, double x_row, const FixedPointOptions& opts) {
  const Grid& g = A.grid;
  const double x0 = kernel_contraction_threshold(A);
  const Index ic = std::min<Index>(Index(std::floor(x0 / g.step() + 1e-9)) + 1, g.intervals() - 4);
  FixedPointOptions o = opts;
  o.check_threshold = false;
  RealFunction tail = kernel_to_F(A, g[ic], o);
  if (x_row >= g[ic]) return tail;
  return extend_F_inward(A, tail, x_row, o);
}

}  // namespace invscat
