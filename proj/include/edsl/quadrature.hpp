#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Core>

namespace edsl::quad {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

// Three-point Gauss-Legendre rule on [0,1].
inline constexpr std::array<double, 3> kGauss3Nodes = {0.1127016653792583, 0.5, 0.8872983346207417};
inline constexpr std::array<double, 3> kGauss3Weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

namespace detail {
// Kronrod 15-point extension of the 7-point Gauss rule on [-1,1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
auto gk15(const F& f, double a, double b, double& err) {
  const double c = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);
  using T = std::decay_t<decltype(f(c))>;
  const T fc = f(c);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = hl * kXgk[j];
    const T s = f(c - dx) + f(c + dx);
    kron = kron + s * kWgk[j];
    if (j % 2 == 1) gauss = gauss + s * kWg[j / 2];
  }
  err = magnitude(T((kron - gauss) * hl));
  return T(kron * hl);
}

template <class F, class T>
void adapt(const F& f, double a, double b, double tol, int depth, T& acc, double& err_acc) {
  double err = 0.0;
  T v = gk15(f, a, b, err);
  if (err <= tol || depth <= 0 || b - a < 1e-12 * std::max(1.0, std::abs(a))) {
    acc = acc + v;
    err_acc += err;
    return;
  }
  const double c = 0.5 * (a + b);
  adapt(f, a, c, 0.5 * tol, depth - 1, acc, err_acc);
  adapt(f, c, b, 0.5 * tol, depth - 1, acc, err_acc);
}
}  // namespace detail

// m-point Gauss-Legendre rule on [-1,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int m) {
  GaussRule g;
  g.nodes.resize(m);
  g.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.nodes[m - 1 - i] = x;
    g.weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

struct Estimate {
  double error = 0.0;
};

// Adaptive G7/K15 on [a,b]. The integrand is never evaluated at a or b, so
// integrable endpoint singularities are allowed.
template <class F>
auto integrate(const F& f, double a, double b, double tol, Estimate* est = nullptr, int max_depth = 40) {
  using T = std::decay_t<decltype(f(a))>;
  double err = 0.0;
  T first = detail::gk15(f, a, b, err);
  if (err <= tol || b <= a) {
    if (est) est->error = err;
    return first;
  }
  T acc = T(first * 0.0);
  double err_acc = 0.0;
  detail::adapt(f, a, b, tol, max_depth, acc, err_acc);
  if (est) est->error = err_acc;
  return acc;
}

// Integrates piecewise over [a,b], splitting at the given interior points.
template <class F>
auto integrate_split(const F& f, double a, double b, const std::vector<double>& splits, double tol,
                     Estimate* est = nullptr) {
  using T = std::decay_t<decltype(f(a))>;
  std::vector<double> inner;
  for (double s : splits)
    if (s > a && s < b) inner.push_back(s);
  std::sort(inner.begin(), inner.end());
  std::vector<double> pts{a};
  for (double s : inner)
    if (s > pts.back()) pts.push_back(s);
  pts.push_back(b);
  const double piece_tol = tol / static_cast<double>(pts.size() - 1);
  Estimate e;
  T acc = integrate(f, pts[0], pts[1], piece_tol, &e);
  double err = e.error;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    acc = acc + integrate(f, pts[i], pts[i + 1], piece_tol, &e);
    err += e.error;
  }
  if (est) est->error = err;
  return acc;
}

}  // namespace edsl::quad
