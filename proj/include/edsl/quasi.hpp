#pragma once

// The first-order quasi-derivative system for -y'' + q y + 2 lambda p y = lambda^2 y:
//   y'    = y1 + r y
//   y1'   = -r y1 - r^2 y + 2 lambda p y - lambda^2 y,     y1 = y' - r y.

#include <array>

#include "edsl/potential.hpp"
#include "edsl/propagator.hpp"
#include "edsl/quadrature.hpp"

namespace edsl {

class QuasiCoeff {
 public:
  struct Node {
    double x;
    cplx int_r;
    cplx int_p;
  };

  QuasiCoeff(const Potential& p, const Potential& r, cplx lambda) : p_(&p), r_(&r), lambda_(lambda) {}

  Node node(double x) const { return {x, r_->integral(x), p_->empty() ? cplx(0.0) : p_->integral(x)}; }

  void cell(double a, double b, const Node& na, const Node& nb, Mat2& omega, Mat2* domega) const {
    const double h = b - a;
    const cplx dr = nb.int_r - na.int_r;
    const cplx dp = nb.int_p - na.int_p;
    cplx r2 = 0.0;
    // cells a few ulps wide would put Gauss points on a log center; their share is negligible
    const bool tiny = h < 1e-13;
    for (int j = 0; j < 3 && !tiny; ++j) {
      const cplx rv = (*r_)(a + h * quad::kGauss3Nodes[j]);
      r2 += quad::kGauss3Weights[j] * rv * rv;
    }
    r2 *= h;
    omega << dr, h, -r2 + 2.0 * lambda_ * dp - lambda_ * lambda_ * h, -dr;
    if (domega) *domega << 0.0, 0.0, 2.0 * dp - 2.0 * lambda_ * h, 0.0;
  }

 private:
  const Potential* p_;
  const Potential* r_;
  cplx lambda_;
};

inline MeshSpec mesh_spec(const Potential& p, const Potential& r) {
  MeshSpec spec;
  spec.breakpoints = p.breakpoints();
  for (double b : r.breakpoints()) spec.breakpoints.push_back(b);
  spec.singular = p.log_centers();
  for (double c : r.log_centers()) spec.singular.push_back(c);
  return spec;
}

// Fundamental matrix of the quasi system with Y(0) = init.
inline Propagation solve_quasi(const Potential& p, const Potential& r, cplx lambda, const Mat2& init,
                               PropagateOptions opt) {
  const QuasiCoeff coeff(p, r, lambda);
  opt.base_cells_per_unit = std::max(opt.base_cells_per_unit, static_cast<int>(std::abs(lambda)));
  return propagate(mesh_spec(p, r), coeff, init, opt);
}

}  // namespace edsl
