#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "invscat/errors.hpp"

namespace invscat {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Eigen::VectorXd;
using Eigen::VectorXcd;

// Uniform grid x_i = x_min + i*h, i = 0..n.
class Grid {
 public:
  Grid() = default;
  Grid(double x_min, double x_max, Index n);
  // n = round((x_max - x_min) / h); x_max must sit on the lattice.
  static Grid with_step(double x_min, double x_max, double h);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  Index intervals() const { return n_; }
  Index size() const { return n_ + 1; }
  double step() const { return h_; }
  double operator[](Index i) const { return i == n_ ? x_max_ : x_min_ + double(i) * h_; }
  VectorXd points() const;

  bool contains(double x) const;
  bool on_grid(double x) const;
  // Index of a lattice point; RangeError if x is not (within 1e-9 h) on the grid.
  Index index_of(double x) const;
  bool symmetric() const;

  bool operator==(const Grid& o) const = default;

 private:
  double x_min_ = 0.0, x_max_ = 1.0, h_ = 1.0 / 8;
  Index n_ = 8;
};

template <typename Scalar>
struct SampledFunction {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Grid grid;
  Vector values;

  SampledFunction() = default;
  SampledFunction(const Grid& g, Vector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw RangeError("sample count " + std::to_string(values.size()) +
                       " does not match grid size " + std::to_string(grid.size()));
    if (!values.allFinite()) throw DomainError("non-finite sample");
  }
  template <typename F>
  static SampledFunction from(const Grid& g, F&& fn) {
    Vector v(g.size());
    for (Index i = 0; i < g.size(); ++i) v(i) = fn(g[i]);
    return SampledFunction(g, std::move(v));
  }

  Index size() const { return values.size(); }
  double x(Index i) const { return grid[i]; }

  // Linear interpolation; RangeError outside the grid.
  Scalar operator()(double x) const {
    if (!grid.contains(x)) throw RangeError("evaluation point outside grid");
    double t = (x - grid.x_min()) / grid.step();
    Index i = std::min<Index>(Index(std::floor(t)), grid.intervals() - 1);
    if (i < 0) i = 0;
    double w = t - double(i);
    return values(i) * (1.0 - w) + values(i + 1) * w;
  }
};

using RealFunction = SampledFunction<double>;
using ComplexFunction = SampledFunction<Complex>;

namespace detail {
template <typename Scalar>
Scalar composite_rule(const SampledFunction<Scalar>& f, Index i0, Index i1) {
  const double h = f.grid.step();
  const auto& v = f.values;
  Index m = i1 - i0;
  if (m <= 0) return Scalar(0);
  if (m == 1) return 0.5 * h * (v(i0) + v(i1));
  Scalar s(0);
  Index simpson_end = (m % 2 == 0) ? i1 : i1 - 3;
  for (Index i = i0; i < simpson_end; i += 2)
    s += h / 3.0 * (v(i) + 4.0 * v(i + 1) + v(i + 2));
  if (m % 2 == 1)  // three-eighths rule on the last three cells
    s += 3.0 * h / 8.0 * (v(i1 - 3) + 3.0 * v(i1 - 2) + 3.0 * v(i1 - 1) + v(i1));
  return s;
}
}  // namespace detail

// Composite Simpson (with a 3/8 closing panel for odd counts, trapezoid for a
// single cell) over the lattice part of [a,b]; partial cells at off-grid
// endpoints use the trapezoid rule on linearly interpolated values.
template <typename Scalar>
Scalar integrate(const SampledFunction<Scalar>& f, double a, double b) {
  const Grid& g = f.grid;
  const double tol = 1e-9 * g.step();
  if (a > b) throw RangeError("integrate: a > b");
  if (a < g.x_min() - tol || b > g.x_max() + tol) throw RangeError("integrate: [a,b] outside grid");
  a = std::max(a, g.x_min());
  b = std::min(b, g.x_max());
  double ta = (a - g.x_min()) / g.step(), tb = (b - g.x_min()) / g.step();
  Index i0 = Index(std::ceil(ta - 1e-9)), i1 = Index(std::floor(tb + 1e-9));
  if (i0 > i1) return 0.5 * (b - a) * (f(a) + f(b));
  Scalar s = detail::composite_rule(f, i0, i1);
  if (g[i0] - a > tol) s += 0.5 * (g[i0] - a) * (f(a) + f.values(i0));
  if (b - g[i1] > tol) s += 0.5 * (b - g[i1]) * (f.values(i1) + f(b));
  return s;
}

template <typename Scalar>
Scalar integrate(const SampledFunction<Scalar>& f) {
  return detail::composite_rule(f, 0, f.grid.intervals());
}

// Second-order differences: central inside, one-sided three-point at the ends.
template <typename Scalar>
SampledFunction<Scalar> differentiate(const SampledFunction<Scalar>& f) {
  const Index n = f.grid.intervals();
  if (n < 4) throw RangeError("differentiate needs at least 4 intervals");
  const double h = f.grid.step();
  const auto& v = f.values;
  typename SampledFunction<Scalar>::Vector d(n + 1);
  for (Index i = 1; i < n; ++i) d(i) = (v(i + 1) - v(i - 1)) / (2 * h);
  d(0) = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2 * h);
  d(n) = (3.0 * v(n) - 4.0 * v(n - 1) + v(n - 2)) / (2 * h);
  return SampledFunction<Scalar>(f.grid, std::move(d));
}

// (1/2pi) * integral of g(k) e^{ikx} dk over the k-grid, trapezoid rule.
// ResolutionError when |x| dk > 1.
Complex fourier_integral(const ComplexFunction& g, double x);

// Integral of g(y) e^{iky} over [y0, y0 + (m-1) h] for samples g(0..m-1),
// complex k allowed. Filon-Simpson panels (exact for piecewise quadratics times
// the exponential); an odd interval count closes with a Filon-linear cell.
Complex oscillatory_integral(const Eigen::Ref<const VectorXd>& g, double y0, double h, Complex k);

// T(i) = integral of the samples from x_i to the last point, accumulated per
// cell with a three-point quadratic rule. With `nonnegative` each cell
// contribution is clamped at zero, keeping profiles of |.| monotone.
VectorXd tail_integral(const Eigen::Ref<const VectorXd>& v, double h, bool nonnegative = false);

// M(i) = max_{j >= i} |v(j)|.
VectorXd running_max_from_right(const Eigen::Ref<const VectorXd>& v);

// Integrability verdict for a sampled nonnegative tail: fit log g against
// log x over the last decade of positive x. Finite iff the fitted exponent is
// below `max_exponent` or |g| on [0.9 x_max, x_max] is negligible relative to the global scale.
struct TailVerdict {
  bool finite = true;
  double exponent = -INFINITY;
  double tail_max = 0.0;  // max |g| on [0.9 x_max, x_max]
  std::string basis;
};
TailVerdict tail_decay_verdict(const Grid& g, const Eigen::Ref<const VectorXd>& values,
                               double max_exponent = -2.0, double negligible = 1e-12);

}  // namespace invscat
