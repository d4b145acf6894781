#pragma once

// Eigenvalues of the pencil: location, labeling, multiplicities, norming
// constants, eigenfunction remainders and associated chains.
//
// Labels follow lambda_n = pi n + p0 + remainder (n != 0) for the Dirichlet
// problem and mu_n = pi (n + 1/2) + p0 + remainder (n in Z) for the mixed one.

#include <memory>
#include <optional>
#include <vector>

#include "edsl/dirac.hpp"

namespace edsl {

// Shifts the spectral parameter until the characteristic function does not
// vanish at 0. The applied shift accumulates in Problem::shift().
Problem ensure_assumption_A(const Problem& problem, double tol = 1e-10);
double assumption_A_threshold(const Problem& problem, double tol = 1e-10);

cplx initial_guess(int n, cplx p0, BoundaryCondition bc);

struct RefineResult {
  cplx lambda;
  int multiplicity_hint = 1;
  int iterations = 0;
};

// Damped Newton, with an argument-principle search in the unit disc around
// the guess when Newton stalls or leaves it.
RefineResult refine(cplx guess, const CharFunction& f, double tol);

struct Rectangle {
  double re0, re1, im0, im1;
};
struct Circle {
  cplx center;
  double radius;
};

// Winding number of f along the contour (counterclockwise), i.e. the number
// of zeros inside counted with multiplicity.
int count_zeros(const CharFunction& f, const Rectangle& rect, double tol = 1e-6);
int count_zeros(const CharFunction& f, const Circle& circle, double tol = 1e-6);

struct LabeledEigenvalue {
  int n = 0;
  cplx lambda;
  cplx remainder;
  int multiplicity = 1;
  std::optional<cplx> norming;
  bool outside_theorem = false;  // norming constant computed beyond real simple data
  double eigenfunction_residual = 0.0;
};

struct WindowSum {
  int N;         // window N < |n| <= 2N
  double value;  // sum of |remainder|^2
};

struct SpectrumReport {
  std::vector<LabeledEigenvalue> eigenvalues;
  std::vector<WindowSum> l2_windows;
  cplx shift = 0.0;  // spectral shift applied to enforce assumption (A)
  cplx p0 = 0.0;
};

// Everything the spectral routines need for one problem, with (A) enforced.
struct SpectralContext {
  Problem original;
  Problem shifted;
  DiracPotential dp;           // shifted problem, used for zeros
  DiracPotential dp_original;  // original problem, used for eigenvectors
  double tol;

  CharFunction charfn(double eval_tol) const;
  cplx shift() const { return shifted.shift() - original.shift(); }
};

std::shared_ptr<const SpectralContext> make_context(const Problem& problem, double tol = 1e-10,
                                                    const PrueferOptions& popt = {});

struct SpectrumOptions {
  double tol = 1e-10;
  double contour_tol = 1e-6;
  int max_depth = 12;
};

SpectrumReport compute_spectrum(const SpectralContext& ctx, int n_min, int n_max, const SpectrumOptions& opt = {});
SpectrumReport compute_spectrum(const Problem& problem, int n_min, int n_max, const SpectrumOptions& opt = {});

// Dyadic sums of values indexed by n over N < |n| <= 2N, N = 1, 2, 4, ...
// while the window is covered by the labels present.
std::vector<WindowSum> dyadic_windows(const std::vector<int>& n, const std::vector<double>& values);

// alpha_n = ||U(., lambda_n)(1, 0)^t||_{L2}
void norming_constants(const SpectralContext& ctx, std::vector<LabeledEigenvalue>& eigen);
// ||u2(., lambda_n) - sin(lambda_n x - int_0^x p)||_{L2}
std::vector<double> eigenfunction_asymptotics(const SpectralContext& ctx, std::vector<LabeledEigenvalue>& eigen);

struct ChainReport {
  int m = 1;
  std::vector<double> residuals;         // integrated residual of the chain equation, j = 0..m-1
  std::vector<double> boundary_defects;  // right boundary functional of y_j, j = 0..m-1
  double next_defect = 0.0;              // boundary functional of y_m
};

// y_j = (1/j!) d^j y / d lambda^j of the quasi solution with y(0) = 0, y^[1](0) = 1.
// Throws InvalidInput("order less than m") if the functional of y_{m-1} does not vanish.
ChainReport associated_chain(const Problem& problem, cplx lambda, int m, double tol = 1e-10);

}  // namespace edsl
