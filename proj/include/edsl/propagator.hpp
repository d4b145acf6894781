#pragma once

// Cell-exponential integration of traceless 2x2 linear systems Y' = A(x) Y.
//
// On every cell [a,b] the coefficient is frozen at its cell average and
// exp(int_a^b A) is applied exactly. The scheme is symmetric and second order,
// tolerates discontinuous or integrably singular coefficients when cells are
// split at the bad points, and carries the lambda-derivative of the discrete
// propagator when asked to. Meshes of successive levels are nested, so two
// levels combine into a Richardson-extrapolated solution at the coarse nodes.
//
// A coefficient type provides
//   Node node(double x) const;
//   void cell(double a, double b, const Node& na, const Node& nb, Mat2& omega, Mat2* domega) const;
// where omega = int_a^b A and domega is its lambda-derivative.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "edsl/errors.hpp"

namespace edsl {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

Mat2 expm_traceless(const Mat2& omega);
// exp(omega) and its derivative along a traceless direction domega.
void expm_traceless(const Mat2& omega, const Mat2& domega, Mat2& e, Mat2& de);

// Points where cells must be split, and points where the coefficient is
// unbounded so that cells are graded toward them.
struct MeshSpec {
  std::vector<double> breakpoints;
  std::vector<double> singular;
};

// Level l halves every cell of level 0, so meshes of successive levels are nested.
std::vector<double> build_mesh(const MeshSpec& spec, int cells_per_unit, int level = 0);

struct PropagateOptions {
  double tol = 1e-8;
  bool want_derivative = false;
  bool dense = false;
  int base_cells_per_unit = 16;
  std::size_t max_cells = std::size_t{1} << 21;
};

struct Propagation {
  std::vector<double> nodes;   // dense output abscissae
  std::vector<Mat2> values;    // solution at nodes
  std::vector<Mat2> d_values;  // lambda-derivative at nodes (if requested)
  Mat2 end = Mat2::Identity();
  Mat2 d_end = Mat2::Zero();
  double error_estimate = 0.0;
  std::size_t cells = 0;

  std::size_t cell_of(double x) const;
};

namespace detail {

inline double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

template <class Coeff>
Propagation propagate_on(const std::vector<double>& mesh, const Coeff& coeff, const Mat2& init,
                         bool want_d, bool dense) {
  Propagation out;
  out.cells = mesh.size() - 1;
  Mat2 u = init;
  Mat2 du = Mat2::Zero();
  if (dense) {
    out.nodes = mesh;
    out.values.reserve(mesh.size());
    out.values.push_back(u);
    if (want_d) {
      out.d_values.reserve(mesh.size());
      out.d_values.push_back(du);
    }
  }
  auto na = coeff.node(mesh[0]);
  Mat2 omega, domega, e, de;
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    auto nb = coeff.node(mesh[k + 1]);
    if (want_d) {
      coeff.cell(mesh[k], mesh[k + 1], na, nb, omega, &domega);
      expm_traceless(omega, domega, e, de);
      du = (de * u + e * du).eval();
    } else {
      coeff.cell(mesh[k], mesh[k + 1], na, nb, omega, nullptr);
      e = expm_traceless(omega);
    }
    u = (e * u).eval();
    if (dense) {
      out.values.push_back(u);
      if (want_d) out.d_values.push_back(du);
    }
    na = std::move(nb);
  }
  out.end = u;
  out.d_end = du;
  return out;
}

// Richardson combination of a fine dense run with the coarse one, restricted
// to the coarse nodes (which are a subset of the fine nodes).
void extrapolate_dense(const Propagation& coarse, Propagation& fine);

}  // namespace detail

// Adaptive integration over [0,1]. The mesh density doubles until two
// successive Richardson-extrapolated end values agree to tol relative to
// max(1, |Y(1)|).
template <class Coeff>
Propagation propagate(const MeshSpec& spec, const Coeff& coeff, const Mat2& init,
                      const PropagateOptions& opt) {
  int level = 0;
  auto run = [&](bool dense) {
    const auto mesh = build_mesh(spec, opt.base_cells_per_unit, level);
    if (mesh.size() > opt.max_cells) throw NumericalFailure("tolerance not reached: cell budget exhausted");
    return detail::propagate_on(mesh, coeff, init, opt.want_derivative, dense);
  };
  Propagation prev = run(opt.dense);
  Mat2 r_prev = prev.end;
  Mat2 dr_prev = prev.d_end;
  for (;;) {
    ++level;
    Propagation cur = run(opt.dense);
    const Mat2 r = (4.0 * cur.end - prev.end) / 3.0;
    const Mat2 dr = (4.0 * cur.d_end - prev.d_end) / 3.0;
    const double scale = std::max(1.0, detail::max_abs(r));
    const double diff = detail::max_abs(r - r_prev);
    if (!std::isfinite(diff)) throw NumericalFailure("tolerance not reached: non-finite solution");
    const double ddiff = opt.want_derivative ? detail::max_abs(dr - dr_prev) : 0.0;
    const double dscale = std::max(1.0, detail::max_abs(dr));
    if (level >= 2 && diff <= opt.tol * scale && ddiff <= std::sqrt(opt.tol) * dscale) {
      if (opt.dense) detail::extrapolate_dense(prev, cur);
      cur.end = r;
      cur.d_end = dr;
      cur.error_estimate = diff / scale;
      return cur;
    }
    prev = std::move(cur);
    r_prev = r;
    dr_prev = dr;
  }
}

namespace detail {

// Propagator over [a,x] from n equal frozen cells, with its lambda-derivative.
template <class Coeff>
void partial_cells(const Coeff& coeff, double a, double x, int n, bool want_d, Mat2& e, Mat2& de) {
  e = Mat2::Identity();
  de = Mat2::Zero();
  Mat2 omega, domega, ek, dek;
  auto na = coeff.node(a);
  for (int k = 1; k <= n; ++k) {
    const double b = k == n ? x : a + (x - a) * k / n;
    auto nb = coeff.node(b);
    const double lo = a + (x - a) * (k - 1) / n;
    if (want_d) {
      coeff.cell(lo, b, na, nb, omega, &domega);
      expm_traceless(omega, domega, ek, dek);
      de = (dek * e + ek * de).eval();
    } else {
      coeff.cell(lo, b, na, nb, omega, nullptr);
      ek = expm_traceless(omega);
    }
    e = (ek * e).eval();
    na = std::move(nb);
  }
}

}  // namespace detail

// Solution at an arbitrary x: integrate from the nearest node below with one
// and two frozen cells and extrapolate.
template <class Coeff>
Mat2 dense_value(const Propagation& prop, const Coeff& coeff, double x, Mat2* d_value = nullptr) {
  const std::size_t k = prop.cell_of(x);
  const double a = prop.nodes[k];
  const bool want_d = d_value && !prop.d_values.empty();
  if (x == a) {
    if (d_value) *d_value = want_d ? prop.d_values[k] : Mat2::Zero();
    return prop.values[k];
  }
  Mat2 e1, de1, e2, de2;
  detail::partial_cells(coeff, a, x, 1, want_d, e1, de1);
  detail::partial_cells(coeff, a, x, 2, want_d, e2, de2);
  const Mat2 e = (4.0 * e2 - e1) / 3.0;
  if (d_value) {
    if (want_d) {
      const Mat2 de = (4.0 * de2 - de1) / 3.0;
      *d_value = de * prop.values[k] + e * prop.d_values[k];
    } else {
      *d_value = Mat2::Zero();
    }
  }
  return e * prop.values[k];
}

}  // namespace edsl
