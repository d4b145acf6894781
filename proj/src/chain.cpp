#include <cmath>
#include <numbers>

#include "edsl/errors.hpp"
#include "edsl/quadrature.hpp"
#include "edsl/quasi.hpp"
#include "edsl/spectrum.hpp"

namespace edsl {

namespace {

constexpr int kContourPoints = 16;
constexpr double kContourRadius = 0.25;

}  // namespace

ChainReport associated_chain(const Problem& problem, cplx lambda, int m, double tol) {
  if (m < 1 || m > 3) throw InvalidInput("chain length must be 1, 2 or 3", "m");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive", "tol");
  const Potential& p = problem.p();
  const Potential& r = problem.r();
  const bool dirichlet = problem.bc() == BoundaryCondition::dirichlet;

  // solutions on a circle around lambda; Taylor coefficients by the trapezoidal rule
  std::vector<cplx> z(kContourPoints);
  std::vector<Propagation> sol;
  PropagateOptions opt;
  opt.tol = tol;
  opt.dense = true;
  for (int k = 0; k < kContourPoints; ++k) {
    z[k] = lambda + kContourRadius * std::exp(cplx(0.0, 2.0 * std::numbers::pi * k / kContourPoints));
    sol.push_back(solve_quasi(p, r, z[k], Mat2::Identity(), opt));
  }
  const int J = m;  // coefficients 0..m
  // (y_j, y_j^[1]) at x from the second column y(0) = 0, y^[1](0) = 1
  auto coeffs = [&](double x) {
    std::vector<Vec2> c(J + 1, Vec2::Zero());
    for (int k = 0; k < kContourPoints; ++k) {
      const Vec2 y = dense_value(sol[k], QuasiCoeff(p, r, z[k]), x).col(1);
      const cplx dz = z[k] - lambda;
      cplx w = 1.0;
      for (int j = 0; j <= J; ++j) {
        c[j] += y * w;
        w /= dz;
      }
    }
    for (auto& v : c) v /= static_cast<double>(kContourPoints);
    return c;
  };

  // integrated residuals on panels split at the breakpoints
  const int cpu = std::max(32, static_cast<int>(4.0 * std::abs(lambda)));
  const auto mesh = build_mesh(mesh_spec(p, r), cpu);
  static const quad::GaussRule g = quad::gauss_legendre(6);
  std::vector<Vec2> acc(J + 1, Vec2::Zero());
  std::vector<double> res(J, 0.0);
  std::vector<Vec2> start = coeffs(0.0);
  double scale = 1.0;
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const double a = mesh[k], h = mesh[k + 1] - mesh[k];
    if (h < 1e-13) continue;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double x = a + 0.5 * h * (g.nodes[i] + 1.0);
      const auto c = coeffs(x);
      const cplx rx = r(x), px = p(x);
      const cplx c0 = 2.0 * lambda * px - lambda * lambda;
      const cplx c1 = 2.0 * px - 2.0 * lambda;
      for (int j = 0; j < J; ++j) {
        Vec2 d;
        d(0) = c[j](1) + rx * c[j](0);
        d(1) = -rx * c[j](1) - rx * rx * c[j](0) + c0 * c[j](0);
        if (j >= 1) d(1) += c1 * c[j - 1](0);
        if (j >= 2) d(1) -= c[j - 2](0);
        acc[j] += 0.5 * h * g.weights[i] * d;
      }
    }
    const auto c = coeffs(mesh[k + 1]);
    scale = std::max(scale, std::abs(c[0](0)));
    for (int j = 0; j < J; ++j)
      res[j] = std::max(res[j], (c[j] - start[j] - acc[j]).cwiseAbs().maxCoeff());
  }

  const auto end = coeffs(1.0);
  auto functional = [&](const Vec2& y) { return dirichlet ? y(0) : y(1) + problem.h() * y(0); };
  ChainReport rep;
  rep.m = m;
  rep.residuals = res;
  for (int j = 0; j < J; ++j) rep.boundary_defects.push_back(std::abs(functional(end[j])));
  rep.next_defect = std::abs(functional(end[J]));
  const double thr = std::sqrt(tol) * scale;
  for (double d : rep.boundary_defects)
    if (d > thr) throw InvalidInput("order less than m", "m");
  return rep;
}

}  // namespace edsl
