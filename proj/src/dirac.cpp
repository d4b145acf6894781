#include "edsl/dirac.hpp"

#include <algorithm>
#include <cmath>

#include "edsl/errors.hpp"
#include "edsl/quasi.hpp"

namespace edsl {

Mat2 dirac_J() {
  Mat2 j;
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

Mat2 pauli_J1() {
  Mat2 j;
  j << -1.0, 0.0, 0.0, 1.0;
  return j;
}

Mat2 pauli_J2() {
  Mat2 j;
  j << 0.0, 1.0, 1.0, 0.0;
  return j;
}

Mat2 DiracPotential::P(double x) const {
  const cplx vx = v(x);
  Mat2 m;
  m << 0.0, -vx, -vx, 2.0 * p(x);
  return m;
}

Mat2 DiracPotential::Q(double x) const { return p(x) * pauli_J1() - v(x) * pauli_J2(); }

DiracPotential make_dirac(const Potential& p, const MiuraPotential& miura) {
  return DiracPotential{p, miura, mesh_spec(p, miura.r())};
}

DiracPotential make_dirac(const Problem& problem, const PrueferOptions& opt) {
  return make_dirac(problem.p(), MiuraPotential(choose_theta0(problem.r(), opt)));
}

Mat2 FundamentalSolution::U(const DiracPotential& dp, double x) const {
  if (prop.nodes.empty()) throw InvalidInput("fundamental solution has no dense output", "dense");
  return dense_value(prop, DiracCoeff(dp, lambda), x);
}

FundamentalSolution solve_U(const DiracPotential& dp, cplx lambda, double tol, bool want_dlambda,
                            bool dense) {
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive", "tol");
  FundamentalSolution fs;
  fs.lambda = lambda;
  PropagateOptions opt;
  opt.tol = tol;
  opt.want_derivative = want_dlambda;
  opt.dense = dense;
  opt.base_cells_per_unit = std::max(16, static_cast<int>(std::abs(lambda)));
  fs.prop = propagate(dp.mesh, DiracCoeff(dp, lambda), Mat2::Identity(), opt);
  if (dense) {
    for (const auto& m : fs.prop.values) fs.det_drift = std::max(fs.det_drift, std::abs(m.determinant() - 1.0));
  } else {
    fs.det_drift = std::abs(fs.prop.end.determinant() - 1.0);
  }
  return fs;
}

CharValue char_quasi(const Problem& problem, cplx lambda, BoundaryCondition bc, cplx h, double tol) {
  PropagateOptions opt;
  opt.tol = tol;
  opt.want_derivative = true;
  const Propagation y = solve_quasi(problem.p(), problem.r(), lambda, Mat2::Identity(), opt);
  // second column: y(0) = 0, y^[1](0) = 1
  if (bc == BoundaryCondition::dirichlet) return {y.end(0, 1), y.d_end(0, 1)};
  return {y.end(1, 1) + h * y.end(0, 1), y.d_end(1, 1) + h * y.d_end(0, 1)};
}

CharValue u2_at_end(const DiracPotential& dp, cplx lambda, double tol) {
  const FundamentalSolution fs = solve_U(dp, lambda, tol, true);
  return {fs.at_end()(1, 0), fs.d_at_end()(1, 0)};
}

CharValue char_dirichlet(const Problem& problem, const DiracPotential& dp, cplx lambda,
                         const CharOptions& opt) {
  if (std::abs(lambda) < opt.lambda_switch)
    return char_quasi(problem, lambda, BoundaryCondition::dirichlet, 0.0, opt.tol);
  const FundamentalSolution fs = solve_U(dp, lambda, opt.tol, true);
  const cplx u2 = fs.at_end()(1, 0);
  const cplx du2 = fs.d_at_end()(1, 0);
  return {u2 / lambda, du2 / lambda - u2 / (lambda * lambda)};
}

CharValue char_mixed(const Problem& problem, const DiracPotential& dp, cplx mu, cplx h,
                     const CharOptions& opt) {
  if (std::abs(mu) < opt.lambda_switch) return char_quasi(problem, mu, BoundaryCondition::mixed, h, opt.tol);
  const FundamentalSolution fs = solve_U(dp, mu, opt.tol, true);
  const cplx u1 = fs.at_end()(0, 0);
  const cplx u2 = fs.at_end()(1, 0);
  const cplx du1 = fs.d_at_end()(0, 0);
  const cplx du2 = fs.d_at_end()(1, 0);
  const cplx k = dp.miura.h1() + h;
  return {u1 + k * u2 / mu, du1 + k * (du2 / mu - u2 / (mu * mu))};
}

CharFunction characteristic_function(const Problem& problem, const DiracPotential& dp,
                                     const CharOptions& opt) {
  if (problem.bc() == BoundaryCondition::dirichlet)
    return [&problem, &dp, opt](cplx l) { return char_dirichlet(problem, dp, l, opt); };
  return [&problem, &dp, opt](cplx l) { return char_mixed(problem, dp, l, problem.h(), opt); };
}

EigenfunctionTrace eigenfunction_trace(const Problem& problem, const DiracPotential& dp, cplx lambda,
                                       const std::vector<double>& grid, double tol) {
  const FundamentalSolution fs = solve_U(dp, lambda, tol, false, true);
  EigenfunctionTrace tr;
  tr.x = grid;
  for (double x : grid) {
    const Vec2 u = fs.U(dp, x).col(0);
    const cplx w = dp.miura.w(x);
    tr.u1.push_back(u(0));
    tr.u2.push_back(u(1));
    tr.y.push_back(u(1));
    tr.y1.push_back(lambda * u(0) + w * u(1));
  }
  const Vec2 u0 = fs.prop.values.front().col(0);
  const Vec2 u1 = fs.at_end().col(0);
  tr.residual_left = std::abs(u0(1));
  if (problem.bc() == BoundaryCondition::dirichlet) {
    tr.residual_right = std::abs(u1(1));
  } else {
    const cplx y1 = lambda * u1(0) + dp.miura.h1() * u1(1);
    tr.residual_right = std::abs(y1 + problem.h() * u1(1));
  }
  return tr;
}

}  // namespace edsl
