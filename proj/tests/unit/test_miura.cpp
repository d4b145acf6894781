#include <cmath>
#include <numbers>

#include "doctest.h"
#include "edsl/errors.hpp"
#include "edsl/miura.hpp"

using namespace edsl;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("pruefer angle for r = 0") {
  const Potential r0 = Potential::zero();
  SUBCASE("theta0 = pi/2 stays put") {
    const auto ps = solve_pruefer(r0, kPi / 2, 1e-10);
    CHECK(std::abs(ps.theta_at(0.7) - kPi / 2) < 1e-10);
    CHECK(ps.margin == doctest::Approx(1.0).epsilon(1e-12));
    const MiuraPotential mp = miura_v(ps, r0);
    CHECK(std::abs(mp.v(0.3)) < 1e-10);
  }
  SUBCASE("tan theta0 = 1 gives tan theta = 1 + x") {
    const auto ps = solve_pruefer(r0, kPi / 4, 1e-10);
    for (double x : {0.0, 0.2, 0.55, 1.0}) CHECK(std::abs(std::tan(ps.theta_at(x)) - (1.0 + x)) < 1e-9);
    const MiuraPotential mp = miura_v(ps, r0);
    for (double x : {0.1, 0.5, 0.9}) CHECK(std::abs(mp.v(x) - 1.0 / (1.0 + x)) < 1e-9);
    CHECK(std::abs(mp.c() - 1.0) < 1e-12);
    CHECK(std::abs(mp.h1() - 0.5) < 1e-9);
    CHECK(verify_y0(mp, r0) < 1e-9);
  }
  SUBCASE("complex theta0: margin matches the closed-form angle") {
    const cplx theta0(kPi / 2, 1.0);
    const auto ps = solve_pruefer(r0, theta0, 1e-10);
    // theta' = cos^2 theta integrates to tan theta = tan theta0 + x
    double expected = 1e300;
    for (double x : ps.nodes()) {
      const cplx t = std::tan(theta0) + x;
      expected = std::min(expected, std::abs(t / std::sqrt(1.0 + t * t)));
    }
    CHECK(ps.margin == doctest::Approx(expected).epsilon(1e-8));
    CHECK(std::abs(std::tan(ps.theta_at(0.6)) - (std::tan(theta0) + 0.6)) < 1e-9);
  }
}

TEST_CASE("choose_theta0") {
  SUBCASE("r = 0 accepts tau = 1") {
    const auto ps = choose_theta0(Potential::zero());
    CHECK(ps.theta0.imag() == 1.0);
    CHECK(ps.margin >= 0.1);
  }
  SUBCASE("r = 1: closed-form Miura potential") {
    const Potential r = Potential::constant(1.0);
    const auto ps = choose_theta0(r);
    CHECK(ps.theta0.imag() <= 4.0);
    CHECK(ps.margin >= 0.1);
    const MiuraPotential mp = miura_v(ps, r);
    const cplx c = 1.0 / (1.0 + 1.0 / std::tan(ps.theta0));
    for (double x : {0.0, 0.3, 0.8, 1.0}) CHECK(std::abs(mp.v(x) - 1.0 / (x + c)) < 1e-8);
    CHECK(verify_y0(mp, r) < 1e-8);
  }
  SUBCASE("step in r: w continuous and y0 verified") {
    const Potential r({make_step(0.5, 2.0)});
    const auto ps = choose_theta0(r);
    const MiuraPotential mp = miura_v(ps, r);
    CHECK(std::abs(mp.w(0.5 - 1e-12) - mp.w(0.5)) < 1e-9);
    CHECK(std::abs(mp.v(0.5 + 1e-12) - mp.v(0.5 - 1e-12) - 2.0) < 1e-9);
    CHECK(verify_y0(mp, r) < 1e-8);
  }
  SUBCASE("log singularity in r") {
    const Potential r({make_log(0.4, 0.5)});
    const auto ps = choose_theta0(r);
    const MiuraPotential mp = miura_v(ps, r);
    CHECK(std::abs(mp.w(0.4 - 1e-9) - mp.w(0.4 + 1e-9)) < 1e-6);
    CHECK(verify_y0(mp, r) < 1e-7);
  }
}

TEST_CASE("w converges under refinement") {
  const Potential r({make_poly({0.0, 3.0, -2.0}), make_step(0.3, -1.0)});
  const MiuraPotential mp = miura_v(choose_theta0(r), r);
  const auto w = mp.w_grid();
  const auto& xs = mp.pruefer().nodes();
  double jump = 0.0;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) jump = std::max(jump, std::abs(w[k + 1] - w[k]) / (xs[k + 1] - xs[k]));
  // bounded difference quotient: w is Lipschitz away from log terms
  CHECK(jump < 50.0);
}

TEST_CASE("rejects non-positive tolerance") { CHECK_THROWS_AS(solve_pruefer(Potential::zero(), 1.0, 0.0), InvalidInput); }
