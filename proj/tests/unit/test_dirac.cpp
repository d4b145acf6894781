#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "edsl/dirac.hpp"

using namespace edsl;

namespace {
const double kPi = std::numbers::pi;

Problem free_problem(BoundaryCondition bc = BoundaryCondition::dirichlet, cplx h = 0.0) {
  return Problem(Potential::zero(), Potential::zero(), bc, h);
}

DiracPotential dirac_with_theta0(const Problem& pr, cplx theta0) {
  return make_dirac(pr.p(), miura_v(solve_pruefer(pr.r(), theta0, 1e-11), pr.r()));
}
}  // namespace

TEST_CASE("solve_U for zero potentials is a rotation") {
  const Problem pr = free_problem();
  const DiracPotential dp = dirac_with_theta0(pr, kPi / 2);  // v = 0
  for (cplx l : {cplx(1.3), cplx(7.0, 0.5), cplx(-20.0)}) {
    const auto fs = solve_U(dp, l, 1e-10, true, true);
    for (double x : {0.25, 0.6, 1.0}) {
      const Mat2 u = fs.U(dp, x);
      CHECK(std::abs(u(0, 0) - std::cos(l * x)) < 1e-9);
      CHECK(std::abs(u(0, 1) + std::sin(l * x)) < 1e-9);
      CHECK(std::abs(u(1, 0) - std::sin(l * x)) < 1e-9);
    }
    CHECK(fs.det_drift < 1e-9);
  }
}

TEST_CASE("solve_U for constant p") {
  // v = 0, p = c: u2 = y solves y'' + k^2 y = 0 with k^2 = lambda^2 - 2 lambda c, u1 = y' / lambda
  const double c = 0.7;
  const Problem pr(Potential::constant(c), Potential::zero());
  const DiracPotential dp = dirac_with_theta0(pr, kPi / 2);
  const cplx l(2.5, -0.3);
  const auto fs = solve_U(dp, l, 1e-10, false);
  const cplx k = std::sqrt(l * l - 2.0 * l * c);
  Mat2 e;
  e << std::cos(k), -k * std::sin(k) / l, l * std::sin(k) / k, std::cos(k);
  CHECK((fs.at_end() - e).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("det U = 1 for generic data") {
  const Problem pr(Potential({make_poly({0.3, cplx(0.0, 0.5)}), make_step(0.6, 0.4)}),
                   Potential({make_poly({0.0, 1.0, -0.5}), make_step(0.3, 2.0)}));
  const DiracPotential dp = make_dirac(pr);
  for (cplx l : {cplx(0.2), cplx(3.0, 1.0), cplx(-12.0, -0.5)}) {
    const auto fs = solve_U(dp, l, 1e-8, false, true);
    CHECK(fs.det_drift < 1e-7);
  }
}

TEST_CASE("char_dirichlet closed forms") {
  const Problem pr = free_problem();
  const DiracPotential dp = make_dirac(pr);
  CHECK(std::abs(char_dirichlet(pr, dp, kPi / 2).value - 2.0 / kPi) < 1e-9);
  CHECK(std::abs(char_dirichlet(pr, dp, 1e-3).value - std::sin(1e-3) / 1e-3) < 1e-10);
  CHECK(std::abs(char_dirichlet(pr, dp, 0.0).value - 1.0) < 1e-12);
  const Problem p1(Potential::constant(1.0), Potential::zero());
  const DiracPotential dp1 = make_dirac(p1);
  CHECK(std::abs(char_dirichlet(p1, dp1, 2.0).value - 1.0) < 1e-9);
  // derivative against a central difference
  const cplx l(1.7, 0.4);
  const double d = 1e-5;
  const cplx fd = (char_dirichlet(p1, dp1, l + d).value - char_dirichlet(p1, dp1, l - d).value) / (2 * d);
  CHECK(std::abs(char_dirichlet(p1, dp1, l).derivative - fd) < 1e-6);
}

TEST_CASE("char_mixed closed forms") {
  SUBCASE("h = 0, v = 0") {
    const Problem pr = free_problem(BoundaryCondition::mixed);
    const DiracPotential dp = dirac_with_theta0(pr, kPi / 2);
    for (cplx m : {cplx(0.1), cplx(1.0), cplx(2.0, 1.0)}) CHECK(std::abs(char_mixed(pr, dp, m, 0.0).value - std::cos(m)) < 1e-9);
  }
  SUBCASE("h = 0, generic v") {
    const Problem pr = free_problem(BoundaryCondition::mixed);
    const DiracPotential dp = make_dirac(pr);
    for (cplx m : {cplx(0.7), cplx(3.0, -1.0)}) CHECK(std::abs(char_mixed(pr, dp, m, 0.0).value - std::cos(m)) < 1e-8);
  }
  SUBCASE("h = 1") {
    const Problem pr = free_problem(BoundaryCondition::mixed, 1.0);
    const DiracPotential dp = dirac_with_theta0(pr, kPi / 2);
    CHECK(std::abs(char_mixed(pr, dp, kPi / 2, 1.0).value - 2.0 / kPi) < 1e-9);
  }
}

TEST_CASE("branch consistency and seed independence") {
  const Problem pr(Potential({make_poly({0.2, -0.5, 0.4})}), Potential({make_poly({0.1, 0.8}), make_step(0.5, -0.6)}));
  const DiracPotential a = dirac_with_theta0(pr, cplx(kPi / 2, 1.0));
  const DiracPotential b = dirac_with_theta0(pr, cplx(kPi / 2, 4.0));
  const double tol = 1e-9;
  const CharOptions opt{tol, 0.5};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const cplx l(10 * u(rng), 10 * u(rng));
    CHECK(std::abs(char_dirichlet(pr, a, l, opt).value - char_dirichlet(pr, b, l, opt).value) <
          10 * tol * std::max(1.0, std::abs(char_dirichlet(pr, a, l, opt).value)));
  }
  for (double rad : {0.4, 0.5, 0.6}) {
    const cplx l = std::polar(rad, 0.9);
    const cplx dirac = solve_U(a, l, tol, false).at_end()(1, 0) / l;
    const cplx quasi = char_quasi(pr, l, BoundaryCondition::dirichlet, 0.0, tol).value;
    CHECK(std::abs(dirac - quasi) < 10 * tol);
  }
}

TEST_CASE("conjugate symmetry for real data") {
  const Problem pr(Potential({make_poly({0.2, 0.3})}), Potential({make_poly({0.0, -0.7})}));
  const DiracPotential dp = make_dirac(pr);
  const cplx l(2.3, 0.8);
  CHECK(std::abs(char_dirichlet(pr, dp, std::conj(l)).value - std::conj(char_dirichlet(pr, dp, l).value)) < 1e-8);
}

TEST_CASE("eigenfunction trace") {
  const Problem pr = free_problem();
  const DiracPotential dp = dirac_with_theta0(pr, kPi / 2);
  const auto tr = eigenfunction_trace(pr, dp, kPi, {0.0, 0.25, 0.5, 1.0}, 1e-10);
  CHECK(std::abs(tr.u1[1] - std::cos(kPi / 4)) < 1e-9);
  CHECK(std::abs(tr.u2[2] - 1.0) < 1e-9);
  CHECK(tr.residual_right < 1e-9);
  CHECK(tr.residual_left == 0.0);
  const Problem p1(Potential::constant(1.0), Potential::zero());
  const DiracPotential dp1 = make_dirac(p1);
  const auto t1 = eigenfunction_trace(p1, dp1, 1.0 + std::sqrt(1.0 + kPi * kPi), {0.0, 1.0}, 1e-10);
  CHECK(t1.residual_right < 1e-8);
}
