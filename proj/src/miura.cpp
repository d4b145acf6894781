#include "edsl/miura.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "edsl/errors.hpp"
#include "edsl/quadrature.hpp"
#include "edsl/quasi.hpp"

namespace edsl {

namespace {

const Potential& no_p() {
  static const Potential empty;
  return empty;
}

const cplx kI(0.0, 1.0);

// e^{2 i theta} for cot theta = w
cplx angle_exp(cplx w) { return (w + kI) / (w - kI); }

}  // namespace

Vec2 PrueferSolution::y0(double x) const {
  const QuasiCoeff coeff(no_p(), r, 0.0);
  return dense_value(quasi, coeff, x).col(0);
}

cplx PrueferSolution::theta_at(double x) const {
  const std::size_t k = quasi.cell_of(x);
  if (quasi.nodes[k] == x) return theta[k];
  const Vec2 y = y0(x);
  const Vec2 yk = quasi.values[k].col(0);
  return theta[k] + std::log(angle_exp(y(1) / y(0)) / angle_exp(yk(1) / yk(0))) / (2.0 * kI);
}

cplx PrueferSolution::log_y0_at(double x) const {
  const std::size_t k = quasi.cell_of(x);
  if (quasi.nodes[k] == x) return log_y0[k];
  return log_y0[k] + std::log(y0(x)(0) / quasi.values[k](0, 0));
}

PrueferSolution solve_pruefer(const Potential& r, cplx theta0, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive", "tol");
  PrueferSolution ps;
  ps.theta0 = theta0;
  ps.tol = tol;
  ps.r = r;
  const cplx s = std::sin(theta0);
  const cplx c = std::cos(theta0);
  Mat2 init;
  init << s, -c, c, s;
  PropagateOptions opt;
  opt.tol = tol;
  opt.dense = true;
  opt.base_cells_per_unit = 32;
  ps.quasi = solve_quasi(no_p(), ps.r, 0.0, init, opt);

  const double floor = 10.0 * std::sqrt(std::numeric_limits<double>::epsilon());
  const auto& vals = ps.quasi.values;
  ps.theta.resize(vals.size());
  ps.log_y0.resize(vals.size());
  ps.margin = std::numeric_limits<double>::infinity();
  cplx e_prev = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const cplx y = vals[k](0, 0);
    const cplx y1 = vals[k](1, 0);
    if (y == 0.0) throw NumericalFailure("pole proximity: y0 vanishes");
    const cplx e = angle_exp(y1 / y);
    if (k == 0) {
      ps.theta[k] = theta0;
      ps.log_y0[k] = 0.0;
    } else {
      ps.theta[k] = ps.theta[k - 1] + std::log(e / e_prev) / (2.0 * kI);
      ps.log_y0[k] = ps.log_y0[k - 1] + std::log(y / vals[k - 1](0, 0));
    }
    e_prev = e;
    const double m = std::abs(std::sin(ps.theta[k]));
    ps.margin = std::min(ps.margin, m);
    if (m < floor) throw NumericalFailure("pole proximity: |sin theta| below floor");
  }
  return ps;
}

PrueferSolution choose_theta0(const Potential& r, const PrueferOptions& opt) {
  for (double tau = 1.0; tau <= opt.tau_max; tau *= 2.0) {
    const cplx theta0(std::numbers::pi / 2.0, tau);
    try {
      PrueferSolution ps = solve_pruefer(r, theta0, opt.tol);
      if (ps.margin >= opt.accept_margin) return ps;
    } catch (const NumericalFailure&) {
      // too close to a pole; escalate tau
    }
  }
  throw NumericalFailure("no admissible theta0 found");
}

MiuraPotential::MiuraPotential(PrueferSolution ps)
    : ps_(std::make_shared<const PrueferSolution>(std::move(ps))) {
  const auto& vals = ps_->quasi.values;
  c_ = vals.front()(1, 0) / vals.front()(0, 0);
  h1_ = vals.back()(1, 0) / vals.back()(0, 0);
}

cplx MiuraPotential::w(double x) const {
  const Vec2 y = ps_->y0(x);
  return y(1) / y(0);
}

cplx MiuraPotential::int_v(double x) const { return ps_->log_y0_at(x); }

std::vector<cplx> MiuraPotential::w_grid() const {
  std::vector<cplx> out;
  out.reserve(ps_->quasi.values.size());
  for (const auto& m : ps_->quasi.values) out.push_back(m(1, 0) / m(0, 0));
  return out;
}

MiuraPotential miura_v(const PrueferSolution& ps, const Potential& r) {
  if (!(ps.margin > 0.0)) throw InvalidInput("Pruefer solution has no positive margin", "margin");
  PrueferSolution copy = ps;
  copy.r = r;
  return MiuraPotential(std::move(copy));
}

double verify_y0(const MiuraPotential& mp, const Potential& r) {
  // y0 and y0^[1] rebuilt from v alone
  auto y0 = [&](double x) { return std::exp(mp.int_v(x)); };
  auto y1 = [&](double x) { return mp.w(x) * y0(x); };

  std::vector<double> grid;
  constexpr int kCells = 64;
  for (int k = 0; k <= kCells; ++k) grid.push_back(static_cast<double>(k) / kCells);
  for (double b : r.breakpoints()) grid.push_back(b);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double scale = 1.0;
  for (double x : grid) scale = std::max(scale, std::abs(y0(x)));

  const double qtol = 1e-11 * scale;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid[k];
    const double b = grid[k + 1];
    auto f0 = [&](double x) { return y1(x) + r(x) * y0(x); };
    auto f1 = [&](double x) {
      const cplx rv = r(x);
      return -rv * y1(x) - rv * rv * y0(x);
    };
    const cplx ya = y0(a), yb = y0(b);
    const cplx d0 = yb - ya - quad::integrate(f0, a, b, qtol, nullptr, 30);
    const cplx d1 = y1(b) - y1(a) - quad::integrate(f1, a, b, qtol, nullptr, 30);
    worst = std::max({worst, std::abs(d0), std::abs(d1)});
  }
  return worst / scale;
}

}  // namespace edsl
