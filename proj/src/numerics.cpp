#include "invscat/numerics.hpp"

#include <algorithm>
#include <array>
#include <numbers>

namespace invscat {

Grid::Grid(double x_min, double x_max, Index n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!(x_max > x_min)) throw RangeError("grid needs x_max > x_min");
  if (n < 8) throw RangeError("grid needs at least 8 intervals");
  h_ = (x_max - x_min) / double(n);
}

Grid Grid::with_step(double x_min, double x_max, double h) {
  if (!(h > 0)) throw RangeError("grid step must be positive");
  double r = (x_max - x_min) / h;
  Index n = Index(std::llround(r));
  if (std::abs(r - double(n)) > 1e-6) throw RangeError("interval length is not a multiple of the step");
  return Grid(x_min, x_max, n);
}

VectorXd Grid::points() const {
  VectorXd p(size());
  for (Index i = 0; i < size(); ++i) p(i) = (*this)[i];
  return p;
}

bool Grid::contains(double x) const {
  double tol = 1e-9 * h_;
  return x >= x_min_ - tol && x <= x_max_ + tol;
}

bool Grid::on_grid(double x) const {
  if (!contains(x)) return false;
  double t = (x - x_min_) / h_;
  return std::abs(t - std::round(t)) < 1e-7;
}

Index Grid::index_of(double x) const {
  if (!on_grid(x)) throw RangeError("point " + std::to_string(x) + " is not on the grid");
  return Index(std::llround((x - x_min_) / h_));
}

bool Grid::symmetric() const { return std::abs(x_min_ + x_max_) < 1e-9 * h_ && n_ % 2 == 0; }

Complex fourier_integral(const ComplexFunction& g, double x) {
  const Grid& kg = g.grid;
  if (!kg.symmetric()) throw RangeError("fourier_integral needs a symmetric k-grid");
  const double dk = kg.step();
  if (std::abs(x) * dk > 1.0) throw ResolutionError("unresolved oscillation: |x| dk > 1");
  const Index n = kg.intervals();
  Complex s(0);
  for (Index j = 0; j <= n; ++j) {
    double w = (j == 0 || j == n) ? 0.5 : 1.0;
    s += w * g.values(j) * std::exp(Complex(0, kg[j] * x));
  }
  return s * dk / (2 * std::numbers::pi);
}

namespace {

// mu_n = integral_0^2 t^n e^{zt} dt for n = 0,1,2
std::array<Complex, 3> quadratic_moments(Complex z) {
  std::array<Complex, 3> mu{};
  if (std::abs(z) < 1.0) {
    for (int n = 0; n < 3; ++n) {
      Complex term(1), s(0);
      for (int m = 0; m < 40; ++m) {
        s += term * std::ldexp(1.0, n + m + 1) / double(n + m + 1);
        term *= z / double(m + 1);
      }
      mu[n] = s;
    }
    return mu;
  }
  Complex e2 = std::exp(2.0 * z);
  mu[0] = (e2 - 1.0) / z;
  mu[1] = (2.0 * e2 - mu[0]) / z;
  mu[2] = (4.0 * e2 - 2.0 * mu[1]) / z;
  return mu;
}

// integral_0^1 (1-t) e^{zt} dt and integral_0^1 t e^{zt} dt
std::array<Complex, 2> linear_moments(Complex z) {
  if (std::abs(z) < 0.5) {
    Complex w0(0), w1(0), zn(1);
    double fact = 1.0;  // n!
    for (int n = 0; n < 20; ++n) {
      w0 += zn / (fact * (n + 1) * (n + 2));
      w1 += zn / (fact * (n + 2));
      zn *= z;
      fact *= (n + 1);
    }
    return {w0, w1};
  }
  Complex e = std::exp(z);
  return {(e - 1.0 - z) / (z * z), (e * (z - 1.0) + 1.0) / (z * z)};
}

}  // namespace

Complex oscillatory_integral(const Eigen::Ref<const VectorXd>& g, double y0, double h, Complex k) {
  const Index m = g.size() - 1;
  if (m <= 0) return 0.0;
  const Complex z = Complex(0, 1) * k * h;
  const Index pairs_end = (m % 2 == 0) ? m : m - 1;
  Complex s(0);
  if (pairs_end > 0) {
    auto mu = quadratic_moments(z);
    Complex w0 = h * (mu[2] - 3.0 * mu[1] + 2.0 * mu[0]) / 2.0;
    Complex w1 = h * (-mu[2] + 2.0 * mu[1]);
    Complex w2 = h * (mu[2] - mu[1]) / 2.0;
    Complex step = std::exp(2.0 * z), phase = std::exp(Complex(0, 1) * k * y0);
    for (Index i = 0; i < pairs_end; i += 2) {
      s += phase * (w0 * g(i) + w1 * g(i + 1) + w2 * g(i + 2));
      // recompute periodically so the running product does not drift
      phase = ((i / 2) % 64 == 63) ? std::exp(Complex(0, 1) * k * (y0 + double(i + 2) * h)) : phase * step;
    }
  }
  if (pairs_end < m) {
    auto w = linear_moments(z);
    Complex phase = std::exp(Complex(0, 1) * k * (y0 + double(m - 1) * h));
    s += h * phase * (w[0] * g(m - 1) + w[1] * g(m));
  }
  return s;
}

VectorXd tail_integral(const Eigen::Ref<const VectorXd>& v, double h, bool nonnegative) {
  const Index n = v.size() - 1;
  VectorXd t = VectorXd::Zero(n + 1);
  for (Index i = n - 1; i >= 0; --i) {
    double c;
    if (n == 1)
      c = 0.5 * h * (v(0) + v(1));
    else if (i + 2 <= n)
      c = h / 12.0 * (5.0 * v(i) + 8.0 * v(i + 1) - v(i + 2));
    else
      c = h / 12.0 * (-v(i - 1) + 8.0 * v(i) + 5.0 * v(i + 1));
    if (nonnegative) c = std::max(c, 0.0);
    t(i) = t(i + 1) + c;
  }
  return t;
}

VectorXd running_max_from_right(const Eigen::Ref<const VectorXd>& v) {
  VectorXd m(v.size());
  double cur = 0.0;
  for (Index i = v.size() - 1; i >= 0; --i) {
    cur = std::max(cur, std::abs(v(i)));
    m(i) = cur;
  }
  return m;
}

TailVerdict tail_decay_verdict(const Grid& g, const Eigen::Ref<const VectorXd>& values,
                               double max_exponent, double negligible) {
  TailVerdict out;
  const double scale = values.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    out.basis = "identically zero";
    return out;
  }
  const double x_hi = g.x_max();
  if (!(x_hi > 0)) throw RangeError("tail verdict needs positive x");
  const double x_lo = std::max(x_hi / 10.0, g.x_min());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (Index i = 0; i < g.size(); ++i) {
    double x = g[i];
    if (x < x_lo || x <= 0) continue;
    double a = std::abs(values(i));
    if (x >= 0.9 * x_hi) out.tail_max = std::max(out.tail_max, a);
    if (a <= 1e-300) continue;
    double lx = std::log(x), ly = std::log(a);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++count;
  }
  if (out.tail_max <= negligible * scale) {
    out.basis = "negligible tail";
    out.finite = true;
    return out;
  }
  if (count < 3) {
    out.basis = "too few tail samples";
    out.finite = true;
    return out;
  }
  double det = count * sxx - sx * sx;
  out.exponent = (count * sxy - sx * sy) / det;
  out.finite = out.exponent < max_exponent;
  out.basis = "fitted tail exponent";
  return out;
}

}  // namespace invscat
