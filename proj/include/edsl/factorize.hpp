#pragma once

// Truncated principal-value products over the labelled eigenvalues, compared
// with the characteristic functions they factorize.

#include <map>
#include <string>
#include <vector>

#include "edsl/dirac.hpp"
#include "edsl/spectrum.hpp"

namespace edsl {

using EigenTable = std::map<int, cplx>;

EigenTable eigen_table(const SpectrumReport& report);

enum class ProductCase { generic, p0_pi_l, p0_half_pi_l };

constexpr double kCaseEps = 1e-8;

// Resonance case of p0 for the boundary condition; l receives the integer.
ProductCase product_case(cplx p0, BoundaryCondition bc, long* l = nullptr);
std::string case_tag(ProductCase c);

// prod_{0<|n|<=N} (lambda_n - lambda) / (pi n), pairs (n, -n) taken together.
cplx vp_product_dirichlet(cplx lambda, const EigenTable& eig, int N, cplx p0);
// Generic: prod over n = 0..N of the pairs (n, -n-1) with weights pi (n + 1/2).
// p0 = pi/2 + pi l: (-1)^{l+1} (mu'_0 - mu) prod_{0<|m|<=N} (mu'_m - mu) / (pi m), mu'_m = mu_{m-1-l}.
cplx vp_product_mixed(cplx mu, const EigenTable& eig, int N, cplx p0);

struct ProductDiagnostics {
  std::vector<cplx> tests;
  std::vector<int> N_list;
  std::vector<std::vector<cplx>> values;  // [N index][test index]
  std::vector<cplx> reference;
  std::vector<std::vector<double>> rel_error;
  ProductCase product_case = ProductCase::generic;
  std::vector<cplx> prod1;  // prod lambda_n / (pi n) per N
  std::vector<double> prod2_r;
  std::vector<cplx> prod2;  // prod (lambda_n - r e^{i pi/3}) / (nu_n - r e^{i pi/3}) at N = max N_list
};

ProductDiagnostics product_report(const Problem& problem, const EigenTable& eig, const std::vector<cplx>& tests,
                                  const std::vector<int>& N_list, double tol = 1e-10);

}  // namespace edsl
