#pragma once

// Non-vanishing solution y0 of -y'' + q y = 0 through the complex Pruefer
// angle, and the Miura potential v = y0'/y0 (so that q = v' + v^2).

#include <memory>
#include <vector>

#include "edsl/potential.hpp"
#include "edsl/propagator.hpp"

namespace edsl {

// y0 = rho sin(theta), y0^[1] = rho cos(theta), theta(0) = theta0, rho(0) = 1.
struct PrueferSolution {
  cplx theta0;
  double margin = 0.0;  // min |sin theta| over the dense nodes
  double tol = 0.0;
  Potential r;
  Propagation quasi;            // dense solution of the lambda = 0 quasi system
  std::vector<cplx> theta;      // continuous Pruefer angle at quasi.nodes
  std::vector<cplx> log_y0;     // continuous branch of log y0 at quasi.nodes

  const std::vector<double>& nodes() const { return quasi.nodes; }
  // (y0, y0^[1]) at x.
  Vec2 y0(double x) const;
  cplx theta_at(double x) const;
  cplx log_y0_at(double x) const;
};

struct PrueferOptions {
  double tol = 1e-10;
  double accept_margin = 0.1;
  double tau_max = 64.0;
};

// Integrates theta' = (cos theta + r sin theta)^2 from theta(0) = theta0.
// Throws NumericalFailure("pole proximity ...") if |sin theta| drops below
// 10 sqrt(machine epsilon).
PrueferSolution solve_pruefer(const Potential& r, cplx theta0, double tol);

// Tries theta0 = pi/2 + i tau, tau = 1, 2, 4, ..., tau_max.
PrueferSolution choose_theta0(const Potential& r, const PrueferOptions& opt = {});

class MiuraPotential {
 public:
  explicit MiuraPotential(PrueferSolution ps);

  const PrueferSolution& pruefer() const { return *ps_; }
  const Potential& r() const { return ps_->r; }
  // w = v - r = cot theta
  cplx w(double x) const;
  cplx v(double x) const { return r()(x) + w(x); }
  // int_0^x v = log y0(x) (continuous branch, y0(0) = sin theta0 normalised to log 1 = 0)
  cplx int_v(double x) const;
  cplx c() const { return c_; }
  cplx h1() const { return h1_; }
  // w at the dense nodes.
  std::vector<cplx> w_grid() const;

 private:
  std::shared_ptr<const PrueferSolution> ps_;
  cplx c_;
  cplx h1_;
};

MiuraPotential miura_v(const PrueferSolution& ps, const Potential& r);

// Sup over a test grid of the integrated residual of
//   y0' = y0^[1] + r y0,   (y0^[1])' = -r y0^[1] - r^2 y0
// relative to max |y0|, with y0 = exp(int v) and y0^[1] = (v - r) y0.
double verify_y0(const MiuraPotential& mp, const Potential& r);

}  // namespace edsl
