#pragma once

// The Dirac system J U' + P U = lambda U, U(0) = I, with
//   J = [[0, 1], [-1, 0]],  P = [[0, -v], [-v, 2p]],
// and the characteristic functions built from it.

#include <functional>
#include <vector>

#include "edsl/miura.hpp"
#include "edsl/potential.hpp"
#include "edsl/propagator.hpp"

namespace edsl {

Mat2 dirac_J();
Mat2 pauli_J1();  // diag(-1, 1)
Mat2 pauli_J2();  // [[0, 1], [1, 0]]

struct DiracPotential {
  Potential p;
  MiuraPotential miura;
  MeshSpec mesh;

  cplx v(double x) const { return miura.v(x); }
  cplx int_p(double x) const { return p.integral(x); }
  cplx int_v(double x) const { return miura.int_v(x); }
  Mat2 P(double x) const;
  // Q = [[-p, -v], [-v, p]] = p J1 - v J2
  Mat2 Q(double x) const;
};

DiracPotential make_dirac(const Potential& p, const MiuraPotential& miura);
DiracPotential make_dirac(const Problem& problem, const PrueferOptions& opt = {});

class DiracCoeff {
 public:
  struct Node {
    double x;
    cplx int_p;
    cplx int_v;
  };
  DiracCoeff(const DiracPotential& dp, cplx lambda) : dp_(&dp), lambda_(lambda) {}
  Node node(double x) const { return {x, dp_->int_p(x), dp_->int_v(x)}; }
  // U' = -J (lambda - P) U = (-lambda J + J P) U, J P = [[-v, 2p], [0, v]]
  void cell(double a, double b, const Node& na, const Node& nb, Mat2& omega, Mat2* domega) const {
    const double h = b - a;
    const cplx dv = nb.int_v - na.int_v;
    const cplx dp = nb.int_p - na.int_p;
    omega << -dv, 2.0 * dp - lambda_ * h, lambda_ * h, dv;
    if (domega) *domega << 0.0, -h, h, 0.0;
  }

 private:
  const DiracPotential* dp_;
  cplx lambda_;
};

struct FundamentalSolution {
  cplx lambda;
  Propagation prop;
  double det_drift = 0.0;

  const Mat2& at_end() const { return prop.end; }
  const Mat2& d_at_end() const { return prop.d_end; }
  // dense output (requires the solution to be computed with dense = true)
  Mat2 U(const DiracPotential& dp, double x) const;
};

FundamentalSolution solve_U(const DiracPotential& dp, cplx lambda, double tol, bool want_dlambda,
                            bool dense = false);

struct CharOptions {
  double tol = 1e-8;
  double lambda_switch = 0.5;
};

struct CharValue {
  cplx value;
  cplx derivative;
};

// phi(lambda) = u2(1, lambda) / lambda, or y(1) of the quasi system with
// y(0) = 0, y^[1](0) = 1 for |lambda| < lambda_switch.
CharValue char_dirichlet(const Problem& problem, const DiracPotential& dp, cplx lambda,
                         const CharOptions& opt = {});
// psi(mu) = u1(1, mu) + (h1 + h) u2(1, mu) / mu, or y^[1](1) + h y(1) of the
// quasi system with y(0) = 0, y^[1](0) = 1 for |mu| < lambda_switch.
CharValue char_mixed(const Problem& problem, const DiracPotential& dp, cplx mu, cplx h,
                     const CharOptions& opt = {});
// The quasi-system branch alone (exposed for branch-consistency checks).
CharValue char_quasi(const Problem& problem, cplx lambda, BoundaryCondition bc, cplx h, double tol);
// u2(1, lambda) from the Dirac system, the characteristic function of the Dirac operator.
CharValue u2_at_end(const DiracPotential& dp, cplx lambda, double tol);

using CharFunction = std::function<CharValue(cplx)>;
// phi or psi depending on the boundary condition of the problem.
CharFunction characteristic_function(const Problem& problem, const DiracPotential& dp,
                                     const CharOptions& opt = {});

struct EigenfunctionTrace {
  std::vector<double> x;
  std::vector<cplx> y, y1, u1, u2;
  double residual_left = 0.0;   // |y(0)|
  double residual_right = 0.0;  // |y(1)| or |y^[1](1) + h y(1)|
};

EigenfunctionTrace eigenfunction_trace(const Problem& problem, const DiracPotential& dp, cplx lambda,
                                       const std::vector<double>& grid, double tol);

}  // namespace edsl
