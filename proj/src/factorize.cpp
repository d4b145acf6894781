#include "edsl/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edsl/errors.hpp"

namespace edsl {

namespace {

constexpr double kPi = std::numbers::pi;

cplx at(const EigenTable& eig, int n) {
  const auto it = eig.find(n);
  if (it == eig.end()) throw InvalidInput("missing eigenvalue index " + std::to_string(n), "eigenvalues");
  return it->second;
}

// weights of the unperturbed spectrum
cplx nu(int n, cplx p0, BoundaryCondition bc) {
  return bc == BoundaryCondition::dirichlet ? kPi * n + p0 : kPi * (n + 0.5) + p0;
}

}  // namespace

EigenTable eigen_table(const SpectrumReport& report) {
  EigenTable t;
  for (const auto& e : report.eigenvalues) t[e.n] = e.lambda;
  return t;
}

ProductCase product_case(cplx p0, BoundaryCondition bc, long* l) {
  const double shift = bc == BoundaryCondition::dirichlet ? 0.0 : 0.5 * kPi;
  const double x = (p0.real() - shift) / kPi;
  const long k = std::lround(x);
  if (l) *l = k;
  if (std::abs(p0 - (shift + kPi * static_cast<double>(k))) < kCaseEps)
    return bc == BoundaryCondition::dirichlet ? ProductCase::p0_pi_l : ProductCase::p0_half_pi_l;
  return ProductCase::generic;
}

std::string case_tag(ProductCase c) {
  switch (c) {
    case ProductCase::p0_pi_l:
      return "p0=pi*l";
    case ProductCase::p0_half_pi_l:
      return "p0=pi/2+pi*l";
    default:
      return "generic";
  }
}

cplx vp_product_dirichlet(cplx lambda, const EigenTable& eig, int N, cplx p0) {
  if (N < 1) throw InvalidInput("truncation must be positive", "N");
  // the case is detected for reporting; with labels anchored at pi n + p0 the plain product needs no sign
  (void)product_case(p0, BoundaryCondition::dirichlet);
  cplx prod = 1.0;
  for (int n = 1; n <= N; ++n) prod *= (at(eig, n) - lambda) * (at(eig, -n) - lambda) / (-kPi * kPi * n * n);
  return prod;
}

cplx vp_product_mixed(cplx mu, const EigenTable& eig, int N, cplx p0) {
  if (N < 1) throw InvalidInput("truncation must be positive", "N");
  long l = 0;
  if (product_case(p0, BoundaryCondition::mixed, &l) == ProductCase::generic) {
    cplx prod = 1.0;
    for (int n = 0; n <= N; ++n) {
      const double w = kPi * (n + 0.5);
      prod *= (at(eig, n) - mu) * (at(eig, -n - 1) - mu) / (-w * w);
    }
    return prod;
  }
  auto shifted = [&](int m) { return at(eig, m - 1 - static_cast<int>(l)); };
  cplx prod = (shifted(0) - mu) * (l % 2 == 0 ? -1.0 : 1.0);
  for (int m = 1; m <= N; ++m) prod *= (shifted(m) - mu) * (shifted(-m) - mu) / (-kPi * kPi * m * m);
  return prod;
}

ProductDiagnostics product_report(const Problem& problem, const EigenTable& eig, const std::vector<cplx>& tests,
                                  const std::vector<int>& N_list, double tol) {
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw InvalidInput("N list must be strictly increasing", "N_list");
  const bool dirichlet = problem.bc() == BoundaryCondition::dirichlet;
  const cplx p0 = problem.p0();
  ProductDiagnostics d;
  d.tests = tests;
  d.N_list = N_list;
  d.product_case = product_case(p0, problem.bc());
  const DiracPotential dp = make_dirac(problem);
  CharOptions o;
  o.tol = tol;
  const CharFunction f = characteristic_function(problem, dp, o);
  for (cplx z : tests) d.reference.push_back(f(z).value);
  for (int N : N_list) {
    std::vector<cplx> vals;
    std::vector<double> errs;
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const cplx v = dirichlet ? vp_product_dirichlet(tests[i], eig, N, p0) : vp_product_mixed(tests[i], eig, N, p0);
      vals.push_back(v);
      errs.push_back(std::abs(v - d.reference[i]) / std::max(std::abs(d.reference[i]), 1e-300));
    }
    d.values.push_back(vals);
    d.rel_error.push_back(errs);
    cplx p1 = 1.0;
    if (dirichlet) {
      for (int n = 1; n <= N; ++n) p1 *= at(eig, n) * at(eig, -n) / (-kPi * kPi * n * n);
    } else {
      for (int n = 0; n <= N; ++n) {
        const double w = kPi * (n + 0.5);
        p1 *= at(eig, n) * at(eig, -n - 1) / (-w * w);
      }
    }
    d.prod1.push_back(p1);
  }
  if (!N_list.empty()) {
    const int N = N_list.back();
    for (double r : {10.0, 20.0, 40.0}) {
      const cplx z = r * std::exp(cplx(0.0, kPi / 3.0));
      cplx ratio = 1.0;
      for (int n = dirichlet ? 1 : 0; n <= N; ++n) {
        const int m = dirichlet ? -n : -n - 1;
        ratio *= (at(eig, n) - z) * (at(eig, m) - z) /
                 ((nu(n, p0, problem.bc()) - z) * (nu(m, p0, problem.bc()) - z));
      }
      d.prod2_r.push_back(r);
      d.prod2.push_back(ratio);
    }
  }
  return d;
}

}  // namespace edsl
