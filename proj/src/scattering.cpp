#include "invscat/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace invscat {

namespace {

void sort_bound_pairs(std::vector<BoundPair>& b) {
  std::sort(b.begin(), b.end(), [](const BoundPair& x, const BoundPair& y) { return x.k > y.k; });
}

}  // namespace

ScatteringData::ScatteringData(const Grid& g, VectorXcd s, std::vector<BoundPair> b)
    : k_grid(g), s_values(std::move(s)), bound_states(std::move(b)) {
  if (!k_grid.symmetric()) throw RangeError("S-matrix grid must be symmetric about k = 0");
  if (s_values.size() != k_grid.size()) throw RangeError("S sample count does not match the k-grid");
  if (!s_values.allFinite()) throw DomainError("non-finite S sample");
  sort_bound_pairs(bound_states);
}

ScatteringData scattering_from_jost(const JostData& jd) {
  std::vector<BoundPair> b;
  for (const auto& bs : jd.bound_states) {
    if (!(bs.s > 0)) throw InconsistentDataError("bound state without a norming constant");
    b.push_back({bs.k, bs.s});
  }
  return ScatteringData(jd.k_grid, jd.s, std::move(b));
}

ValidationReport validate(const ScatteringData& sd, const ValidationOptions& opts) {
  ValidationReport rep;
  const Index nk = sd.k_grid.size(), mid = sd.k_grid.intervals() / 2;
  const auto& S = sd.s_values;

  double unit = 0, sym = 0, inv = 0;
  for (Index j = 0; j < nk; ++j) {
    Index jm = nk - 1 - j;
    unit = std::max(unit, std::abs(std::abs(S(j)) - 1.0));
    sym = std::max(sym, std::abs(S(jm) - std::conj(S(j))));
    inv = std::max(inv, std::abs(S(jm) * S(j) - 1.0));
  }
  double at_inf = std::max(std::abs(S(0) - 1.0), std::abs(S(nk - 1) - 1.0));
  rep.checks.push_back({"unitarity |S|=1", unit, opts.tol_unitarity, unit <= opts.tol_unitarity, ""});
  rep.checks.push_back({"symmetry S(-k)=conj S(k)", sym, opts.tol_symmetry, sym <= opts.tol_symmetry, ""});
  rep.checks.push_back({"inverse S(-k)S(k)=1", inv, opts.tol_inverse, inv <= opts.tol_inverse, ""});
  rep.checks.push_back({"S(+-K)=1", at_inf, opts.tol_infinity, at_inf <= opts.tol_infinity,
                        "grid truncation residual"});

  bool positive = true, ordered = true;
  for (size_t j = 0; j < sd.bound_states.size(); ++j) {
    const auto& b = sd.bound_states[j];
    if (!(b.k > 0 && b.s > 0)) positive = false;
    if (j > 0 && !(sd.bound_states[j - 1].k > b.k)) ordered = false;
  }
  rep.checks.push_back({"bound states k_j, s_j > 0", positive ? 0.0 : 1.0, 0.0, positive, ""});
  rep.checks.push_back({"bound states distinct", ordered ? 0.0 : 1.0, 0.0, ordered, ""});
  rep.condition_A = all_pass(rep.checks);

  // winding of S: unwrap over the grid, bridging k = 0, then close at |k| = K
  double phase = 0.0, max_step = 0.0;
  Index prev = 0;
  for (Index j = 1; j < nk; ++j) {
    if (j == mid) continue;
    double d = std::arg(S(j) / S(prev));
    max_step = std::max(max_step, std::abs(d));
    phase += d;
    prev = j;
  }
  double closing = 2.0 * std::arg(S(nk - 1));
  rep.winding = (phase - closing) / (2 * std::numbers::pi);
  rep.kappa = int(std::lround(rep.winding));
  // a step of size close to pi cannot be attributed to a direction
  bool resolved = max_step < 0.9 * std::numbers::pi;
  rep.checks.push_back({"phase step resolved", max_step, 0.9 * std::numbers::pi, resolved,
                        "largest |arg increment| between neighbouring k"});

  rep.zero_energy_resonance = S(mid + 1).real() < 0.0;
  const int J = int(sd.J());
  int expected = rep.zero_energy_resonance ? -2 * J - 1 : -2 * J;
  bool nonpositive = rep.kappa <= 0 && std::abs(rep.winding - rep.kappa) < 1e-6;
  bool levinson = rep.kappa == expected;
  rep.checks.push_back({"index nonpositive integer", rep.winding, 0.0, nonpositive, ""});
  rep.checks.push_back({"Levinson relation", double(rep.kappa), double(expected), levinson || !opts.levinson_strict,
                        rep.zero_energy_resonance ? "f(0)=0 branch: kappa = -2J-1" : "kappa = -2J"});
  rep.condition_B = resolved && nonpositive && (levinson || !opts.levinson_strict);
  return rep;
}

FFunction::FFunction(const Grid& g, VectorXd fs, VectorXd fd) : grid(g), f_s(std::move(fs)), f_d(std::move(fd)) {
  if (f_s.size() != g.size() || f_d.size() != g.size()) throw RangeError("F sample count does not match grid");
  if (!(g.x_min() < 0 && g.x_max() > 0)) throw RangeError("F grid must straddle x = 0");
  values = f_s + f_d;
  if (!values.allFinite()) throw DomainError("non-finite F sample");
  zero_index();
}

RealFunction FFunction::nonnegative_part() const {
  Index i0 = zero_index();
  Grid g(0.0, grid.x_max(), grid.intervals() - i0);
  return RealFunction(g, values.tail(grid.size() - i0));
}

double FFunction::half_line_max() const { return grid.x_max() / 2; }

Grid f_grid(double x_neg, double X, double h) { return Grid::with_step(x_neg, 2 * X, h); }

namespace {

// Real coefficients a_m of sum_m a_m (1+ik)^{-m} fitted to 1 - S on [from K, K].
VectorXd fit_tail_model(const ScatteringData& sd, const VectorXcd& S, int order, double from) {
  const Grid& kg = sd.k_grid;
  const double K = kg.x_max();
  std::vector<Index> rows;
  for (Index j = 0; j < kg.size(); ++j)
    if (kg[j] >= from * K) rows.push_back(j);
  const Index nr = Index(rows.size());
  Eigen::MatrixXd M(2 * nr, order);
  VectorXd b(2 * nr);
  for (Index r = 0; r < nr; ++r) {
    double k = kg[rows[r]];
    Complex base = 1.0 / Complex(1.0, k), p = base;
    for (int m = 0; m < order; ++m) {
      M(r, m) = p.real();
      M(nr + r, m) = p.imag();
      p *= base;
    }
    Complex res = 1.0 - S(rows[r]);
    b(r) = res.real();
    b(nr + r) = res.imag();
  }
  return M.colPivHouseholderQr().solve(b);
}

}  // namespace

FFunction build_F(const ScatteringData& sd, const Grid& out, const SynthesisOptions& opts) {
  const Grid& kg = sd.k_grid;
  const Index nk = kg.size(), mid = kg.intervals() / 2;
  const double dk = kg.step();
  if (std::max(std::abs(out.x_min()), std::abs(out.x_max())) * dk > 1.0)
    throw ResolutionError("F grid exceeds the oscillation limit |x| dk <= 1");

  VectorXcd S = sd.s_values;
  if (opts.zero_energy_limit && mid + 3 < nk)
    S(mid) = (3.0 * S(mid + 1) - 3.0 * S(mid + 2) + S(mid + 3)).real();

  VectorXd a = VectorXd::Zero(0);
  if (opts.tail_order > 0 && (1.0 - S.array()).abs().maxCoeff() > 0.0)
    a = fit_tail_model(sd, S, opts.tail_order, opts.tail_fit_from);

  VectorXcd R(nk);
  for (Index j = 0; j < nk; ++j) {
    Complex base = 1.0 / Complex(1.0, kg[j]), p = base, model(0);
    for (Index m = 0; m < a.size(); ++m) {
      model += a(m) * p;
      p *= base;
    }
    R(j) = 1.0 - S(j) - model;
  }
  ComplexFunction Rf(kg, R);

  const Index nx = out.size();
  VectorXd fs(nx), fd = VectorXd::Zero(nx);
  double max_im = 0.0;
  for (Index i = 0; i < nx; ++i) {
    double x = out[i];
    Complex v = fourier_integral(Rf, x);
    max_im = std::max(max_im, std::abs(v.imag()));
    double t = v.real();
    if (x >= -1e-12 * out.step()) {
      double xp = std::max(x, 0.0), term = std::exp(-xp);
      for (Index m = 0; m < a.size(); ++m) {
        t += a(m) * term;
        term *= xp / double(m + 1);
      }
    }
    fs(i) = t;
  }
  for (const auto& b : sd.bound_states)
    for (Index i = 0; i < nx; ++i) fd(i) += b.s * std::exp(-b.k * out[i]);

  FFunction F(out, std::move(fs), std::move(fd));
  F.tail_coefficients = a;
  F.truncation_residual = std::max(std::abs(1.0 - sd.s_values(0)), std::abs(1.0 - sd.s_values(nk - 1)));
  double scale = F.f_s.cwiseAbs().maxCoeff();
  F.imaginary_residue = scale > 0 ? max_im / scale : max_im;
  if (scale > 0 && F.imaginary_residue > opts.tol_imag)
    throw SynthesisError("imaginary residue of F_s is " + std::to_string(F.imaginary_residue));
  return F;
}

namespace {

struct ExpModel {
  std::vector<double> k, s;
  double residual = INFINITY;
  bool valid = false;
  bool sign_violation = false;
};

double model_at(const ExpModel& m, double x) {
  double v = 0;
  for (size_t j = 0; j < m.k.size(); ++j) v += m.s[j] * std::exp(-m.k[j] * x);
  return v;
}

double relative_residual(const ExpModel& m, const VectorXd& x, const VectorXd& f) {
  double r = 0;
  for (Index n = 0; n < x.size(); ++n) r = std::max(r, std::abs(f(n) - model_at(m, x(n))) / std::abs(f(n)));
  return r;
}

// amplitudes for fixed rates, relative weights
bool fit_amplitudes(ExpModel& m, const VectorXd& x, const VectorXd& f) {
  const Index J = Index(m.k.size());
  Eigen::MatrixXd E(x.size(), J);
  for (Index n = 0; n < x.size(); ++n)
    for (Index j = 0; j < J; ++j) E(n, j) = std::exp(-m.k[j] * x(n)) / std::abs(f(n));
  VectorXd rhs = f.cwiseQuotient(f.cwiseAbs());
  VectorXd s = E.colPivHouseholderQr().solve(rhs);
  if (!s.allFinite()) return false;
  for (Index j = 0; j < J; ++j) m.s[j] = s(j);
  return true;
}

// Levenberg-Marquardt on (k_j, s_j) with residuals relative to |F|.
void refine(ExpModel& m, const VectorXd& x, const VectorXd& f) {
  const Index J = Index(m.k.size()), P = 2 * J, N = x.size();
  auto residuals = [&](const ExpModel& mm) {
    VectorXd r(N);
    for (Index n = 0; n < N; ++n) r(n) = (f(n) - model_at(mm, x(n))) / std::abs(f(n));
    return r;
  };
  VectorXd r = residuals(m);
  double cost = r.squaredNorm(), lambda = 1e-3;
  for (int it = 0; it < 100; ++it) {
    Eigen::MatrixXd Jm(N, P);
    for (Index n = 0; n < N; ++n)
      for (Index j = 0; j < J; ++j) {
        double e = std::exp(-m.k[j] * x(n)) / std::abs(f(n));
        Jm(n, j) = m.s[j] * x(n) * e;  // d r / d k_j
        Jm(n, J + j) = -e;            // d r / d s_j
      }
    Eigen::MatrixXd A = Jm.transpose() * Jm;
    VectorXd g = Jm.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20; ++tries) {
      Eigen::MatrixXd Ad = A;
      Ad.diagonal() += lambda * A.diagonal().cwiseMax(1e-300);
      VectorXd step = Ad.ldlt().solve(-g);
      ExpModel t = m;
      for (Index j = 0; j < J; ++j) {
        t.k[j] += step(j);
        t.s[j] += step(J + j);
      }
      VectorXd rt = residuals(t);
      double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        bool small = cost - ct <= 1e-14 * cost;
        m = t;
        r = rt;
        cost = ct;
        lambda = std::max(lambda / 10, 1e-12);
        improved = !small;
        break;
      }
      lambda *= 10;
    }
    if (!improved) break;
  }
}

ExpModel prony(const VectorXd& x, const VectorXd& f, double h, int J) {
  ExpModel m;
  const Index n = x.size();
  const Index L = std::max<Index>(1, n / (2 * J));
  const Index rows = n - J * L;
  if (rows < J + 1) return m;
  Eigen::MatrixXd A(rows, J);
  VectorXd b(rows);
  for (Index r = 0; r < rows; ++r) {
    double scale = 0;
    for (int j = 0; j <= J; ++j) scale = std::max(scale, std::abs(f(r + j * L)));
    for (int j = 0; j < J; ++j) A(r, j) = f(r + j * L) / scale;
    b(r) = -f(r + J * L) / scale;
  }
  VectorXd c = A.colPivHouseholderQr().solve(b);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(J, J);
  for (int j = 0; j < J; ++j) comp(0, j) = -c(J - 1 - j);
  for (int j = 1; j < J; ++j) comp(j, j - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  if (es.info() != Eigen::Success) return m;
  for (int j = 0; j < J; ++j) {
    Complex z = es.eigenvalues()(j);
    if (std::abs(z.imag()) > 1e-8 * std::abs(z) || z.real() <= 0) return m;
    m.k.push_back(-std::log(z.real()) / (double(L) * h));
  }
  m.s.assign(J, 0.0);
  if (!fit_amplitudes(m, x, f)) return m;
  refine(m, x, f);
  std::vector<size_t> idx(J);
  for (int j = 0; j < J; ++j) idx[j] = j;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return m.k[a] > m.k[b]; });
  ExpModel sorted;
  for (size_t j : idx) {
    sorted.k.push_back(m.k[j]);
    sorted.s.push_back(m.s[j]);
  }
  sorted.residual = relative_residual(sorted, x, f);
  sorted.valid = std::isfinite(sorted.residual);
  for (int j = 0; j < J; ++j) {
    if (!(sorted.k[j] > 0 && sorted.s[j] > 0)) {
      sorted.valid = false;
      sorted.sign_violation = true;
    }
    if (j > 0 && !(sorted.k[j - 1] - sorted.k[j] > 1e-8 * sorted.k[j - 1])) sorted.valid = false;
  }
  return sorted;
}

}  // namespace

ScatteringData recover_scattering(const FFunction& F, const RecoveryOptions& opts, RecoveryReport* report) {
  const Grid& g = F.grid;
  const double h = g.step();
  const Index i0 = F.zero_index();
  const double x_neg = g.x_min();
  const Index iw = std::min<Index>(i0 - 4, Index(std::floor(opts.window_fraction * double(i0))));
  if (iw < 8) throw RangeError("negative-x range too short for the exponential fit");

  RecoveryReport rep;
  rep.window_start = x_neg;
  rep.window_end = g[iw];
  VectorXd xw = g.points().head(iw + 1), fw = F.values.head(iw + 1);
  const double scale = F.values.tail(g.size() - i0).cwiseAbs().maxCoeff();
  const double window_max = fw.cwiseAbs().maxCoeff();

  ExpModel chosen;
  chosen.valid = true;
  chosen.residual = 0.0;
  if (window_max > opts.tol_zero * scale) {
    if (fw.minCoeff() <= 0.0)
      throw InconsistentDataError("F changes sign on the negative-x fit window; no positive exponential sum fits");
    std::vector<ExpModel> fits;
    bool any_sign_violation = false;
    for (int J = 1; J <= opts.max_order; ++J) {
      fits.push_back(prony(xw, fw, h, J));
      rep.residuals.push_back(fits.back().valid ? fits.back().residual : INFINITY);
      any_sign_violation = any_sign_violation || fits.back().sign_violation;
    }
    int pick = -1;
    for (int J = 1; J <= opts.max_order; ++J) {
      const ExpModel& m = fits[J - 1];
      if (!m.valid || m.residual > opts.tol_fit) continue;
      bool better_next = J < opts.max_order && m.residual > 1e-12 && fits[J].valid &&
                         fits[J].residual < opts.improvement * m.residual;
      if (!better_next) {
        pick = J;
        break;
      }
    }
    if (pick < 0) {
      if (any_sign_violation)
        throw InconsistentDataError("exponential fit of the negative-x tail needs non-positive k_j or s_j");
      throw FitError("no exponential sum of order <= " + std::to_string(opts.max_order) +
                     " fits the negative-x tail within tolerance");
    }
    chosen = fits[pick - 1];
    rep.order = pick;
  }

  // F_s = F - F_d right of the fit window, zero on it
  VectorXd fs = VectorXd::Zero(g.size());
  for (Index i = iw; i < g.size(); ++i) fs(i) = F.values(i) - model_at(chosen, g[i]);

  const Grid kg = Grid::with_step(-opts.k_max, opts.k_max, opts.dk);
  const Index nk = kg.size(), mid = kg.intervals() / 2;
  VectorXd left = fs.segment(iw, i0 - iw + 1);
  left(left.size() - 1) = 3 * fs(i0 - 1) - 3 * fs(i0 - 2) + fs(i0 - 3);
  VectorXd right = fs.tail(g.size() - i0);
  VectorXcd S(nk);
  for (Index j = mid; j < nk; ++j) {
    double k = j == mid ? 0.0 : kg[j];
    Complex one_minus = oscillatory_integral(left, g[iw], h, -k) + oscillatory_integral(right, 0.0, h, -k);
    Complex s = 1.0 - one_minus;
    if (j == mid) s = s.real();
    S(j) = s;
    S(2 * mid - j) = std::conj(s);
  }
  std::vector<BoundPair> b;
  for (size_t j = 0; j < chosen.k.size(); ++j) b.push_back({chosen.k[j], chosen.s[j]});
  if (report) *report = rep;
  return ScatteringData(kg, std::move(S), std::move(b));
}

}  // namespace invscat
