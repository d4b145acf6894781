#pragma once

// Transformation-operator view of the Dirac system. With a(x) = int_0^x p - lambda x
//   U(x) = e^{a(x) J} + sum_{n>=1} U_n(x),
//   U_n(x) = int_0^x e^{(a(x)-a(s)) J} J Q(s) U_{n-1}(s) ds,
// and equivalently U(x) = e^{a(x) J} + int_0^x e^{-lambda (x-2s) J} K(x,s) ds with
//   K_1(x,s) = e^{P(x) J} Qt(s),
//   K_2(x,s) = e^{P(x) J} int_0^{x-s} Qt(s+t) Qt(t) dt,
// where P = int_0 p and Qt(t) = e^{-2 P(t) J} J Q(t). Matrix norms are spectral norms.

#include <vector>

#include "edsl/dirac.hpp"

namespace edsl {

double norm2(const Mat2& m);
// e^{t J} = cos t I + sin t J
Mat2 expJ(cplx t);

Mat2 Qtilde(const DiracPotential& dp, double t);

struct KernelSeries {
  double Qtilde_norm = 0.0;  // (int_0^1 |Qt|^2)^{1/2}
  double p_l1 = 0.0;         // int_0^1 |p|
  // e^{|p|_1} sum_{n>N} |Qt|^n / (n-1)!
  double tail(int N) const;
};

KernelSeries kernel_series(const DiracPotential& dp, double tol = 1e-8);

struct NeumannTerms {
  std::vector<Mat2> terms;  // U_0(1), ..., U_N(1)
  Mat2 partial_sum(int N) const;
};

// U_n(1) for n <= N by Gauss-panel collocation of the Volterra recursion,
// refined until the partial sum S_N(1) is stable to tol.
NeumannTerms neumann_terms(const DiracPotential& dp, cplx lambda, int N, double tol = 1e-10);

struct KernelValue {
  Mat2 K1;
  Mat2 K2;
};

// Throws InvalidInput unless 0 <= s < x <= 1.
KernelValue kernel_K1K2(const DiracPotential& dp, double x, double s, double tol = 1e-11);

enum class KernelRoute { kernel, neumann };

struct RepresentationCheck {
  double defect = 0.0;  // |U_ODE(1) - truncated representation|
  double bound = 0.0;   // e^{|Im lambda|} tail(N)
  double tail = 0.0;
};

// kernel route: N in {1, 2}; neumann route: any N >= 0.
RepresentationCheck verify_representation(const DiracPotential& dp, cplx lambda, int N, KernelRoute route,
                                          double tol = 1e-10);

struct ContinuityCheck {
  double measured = 0.0;  // |Kt(x2,.) - Kt(x1,.)|_{L2(0,1)} of the two-term kernel
  double bound = 0.0;     // (1 + |Qt|) (int_{x1}^{x2} |Qt|^2)^{1/2}
};

// Kt(x,s) = e^{-P(x) J} K(x,s), extended by zero for s >= x. K does not depend on lambda.
ContinuityCheck continuity_modulus(const DiracPotential& dp, double x1, double x2, double tol = 1e-9);

// |e^{-t J} Qt(s) - Qt(s) e^{t J}|
double anticommutation_defect(const DiracPotential& dp, cplx t, double s);

// (R + K) applied to U_0 = e^{-lambda x J} with the two-term kernel, first column.
Vec2 transform_free_solution(const DiracPotential& dp, cplx lambda, double x, double tol = 1e-9);

}  // namespace edsl
