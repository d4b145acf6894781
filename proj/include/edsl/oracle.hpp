#pragma once

// Finite-difference reference for the pencil lambda^2 y - 2 lambda p y + y'' - q y = 0.
// With A0 ~ -d^2/dx^2 + q and A1 = 2 diag(p) the discrete problem is
// (lambda^2 - lambda A1 - A0) y = 0, solved through a companion linearization.

#include <vector>

#include <Eigen/Dense>

#include "edsl/potential.hpp"
#include "edsl/spectrum.hpp"

namespace edsl {

struct DiscretePencil {
  int M = 0;       // interior nodes
  double h = 0.0;  // 1 / (M + 1)
  Eigen::MatrixXcd A0;
  Eigen::MatrixXcd A1;
  bool real = true;
};

// Steps of r become deltas in q: kappa / h on the diagonal of the nearest node.
// The mixed condition y^[1](1) + h y(1) = 0 is a second-order one-sided row,
// eliminated so that the pencil stays M x M.
DiscretePencil build_pencil(const Problem& problem, int M);

enum class Companion { first, second };

// All 2M eigenvalues of the companion form.
std::vector<cplx> pencil_eigenvalues(const DiscretePencil& pencil, Companion form = Companion::first);
// For each target the nearest eigenvalue from the list.
std::vector<cplx> nearest(const std::vector<cplx>& eigenvalues, const std::vector<cplx>& targets);

struct OracleRow {
  int n;
  int M;  // 0 for the Richardson-extrapolated row
  cplx solver;
  cplx oracle;
  double diff;
};

struct OracleComparison {
  std::vector<OracleRow> rows;
  std::vector<double> observed_order;  // per n, from the two finest M
  double max_diff_finest = 0.0;
  double max_diff_extrapolated = 0.0;
};

OracleComparison oracle_compare(const Problem& problem, int n_min, int n_max, const std::vector<int>& M_list,
                                const SpectrumOptions& opt = {});

}  // namespace edsl
