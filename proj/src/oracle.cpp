#include "edsl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edsl/errors.hpp"

namespace edsl {

DiscretePencil build_pencil(const Problem& problem, int M) {
  if (M < 3) throw InvalidInput("grid too small", "M");
  if (problem.r().has_log_terms() || problem.p().has_log_terms())
    throw InvalidInput("unsupported singular term", "r");
  const bool mixed = problem.bc() == BoundaryCondition::mixed;
  DiscretePencil d;
  d.M = M;
  d.h = 1.0 / (M + 1);
  d.real = problem.is_real();
  const double h = d.h, ih2 = 1.0 / (h * h);
  d.A0 = Eigen::MatrixXcd::Zero(M, M);
  d.A1 = Eigen::MatrixXcd::Zero(M, M);
  for (int i = 0; i < M; ++i) {
    const double x = (i + 1) * h;
    d.A0(i, i) = 2.0 * ih2 + problem.r().smooth_derivative(x);
    if (i > 0) d.A0(i, i - 1) = -ih2;
    if (i + 1 < M) d.A0(i, i + 1) = -ih2;
    d.A1(i, i) = 2.0 * problem.p()(x);
  }
  for (const auto& s : problem.r().steps()) {
    const long k = std::lround(s.x0 / h) - 1;
    if (k >= 0 && k < M) d.A0(k, k) += s.jump / h;
  }
  if (mixed) {
    // (3 y_{M+1} - 4 y_M + y_{M-1}) / (2h) + beta y_{M+1} = 0, beta = h_bc - r(1)
    const cplx beta = problem.h() - problem.r().left_limit(1.0);
    const cplx den = 3.0 + 2.0 * h * beta;
    d.A0(M - 1, M - 1) += -ih2 * 4.0 / den;
    d.A0(M - 1, M - 2) += ih2 / den;
  }
  return d;
}

std::vector<cplx> pencil_eigenvalues(const DiscretePencil& d, Companion form) {
  const int M = d.M;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
  const auto I = Eigen::MatrixXcd::Identity(M, M);
  if (form == Companion::first) {
    // lambda (y, lambda y) = [[0, I], [A0, A1]] (y, lambda y)
    C.topRightCorner(M, M) = I;
    C.bottomLeftCorner(M, M) = d.A0;
    C.bottomRightCorner(M, M) = d.A1;
  } else {
    // lambda (y, lambda y - A1 y) = [[A1, I], [A0, 0]] (y, lambda y - A1 y)
    C.topLeftCorner(M, M) = d.A1;
    C.topRightCorner(M, M) = I;
    C.bottomLeftCorner(M, M) = d.A0;
  }
  std::vector<cplx> out;
  if (d.real) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(C.real(), false);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver failure");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver failure");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

std::vector<cplx> nearest(const std::vector<cplx>& eigenvalues, const std::vector<cplx>& targets) {
  std::vector<cplx> out;
  for (cplx t : targets) {
    cplx best = std::numeric_limits<double>::quiet_NaN();
    double dist = std::numeric_limits<double>::infinity();
    for (cplx e : eigenvalues)
      if (std::abs(e - t) < dist) {
        dist = std::abs(e - t);
        best = e;
      }
    out.push_back(best);
  }
  return out;
}

OracleComparison oracle_compare(const Problem& problem, int n_min, int n_max, const std::vector<int>& M_list,
                                const SpectrumOptions& opt) {
  if (M_list.empty()) throw InvalidInput("empty grid list", "M_list");
  for (std::size_t i = 1; i < M_list.size(); ++i)
    if (M_list[i] <= M_list[i - 1]) throw InvalidInput("grid list must be increasing", "M_list");
  const SpectrumReport rep = compute_spectrum(problem, n_min, n_max, opt);
  std::vector<cplx> targets;
  for (const auto& e : rep.eigenvalues) targets.push_back(e.lambda);
  std::vector<std::vector<cplx>> oracle;
  OracleComparison cmp;
  for (int M : M_list) {
    oracle.push_back(nearest(pencil_eigenvalues(build_pencil(problem, M)), targets));
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const double diff = std::abs(oracle.back()[i] - targets[i]);
      cmp.rows.push_back({rep.eigenvalues[i].n, M, targets[i], oracle.back()[i], diff});
    }
  }
  for (std::size_t i = 0; i < targets.size(); ++i) cmp.max_diff_finest = std::max(cmp.max_diff_finest, cmp.rows[cmp.rows.size() - targets.size() + i].diff);
  if (M_list.size() >= 2) {
    const std::size_t a = M_list.size() - 2, b = M_list.size() - 1;
    const double ha = 1.0 / (M_list[a] + 1), hb = 1.0 / (M_list[b] + 1);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      // second-order Richardson in h
      const cplx ext = (ha * ha * oracle[b][i] - hb * hb * oracle[a][i]) / (ha * ha - hb * hb);
      const double diff = std::abs(ext - targets[i]);
      cmp.rows.push_back({rep.eigenvalues[i].n, 0, targets[i], ext, diff});
      cmp.max_diff_extrapolated = std::max(cmp.max_diff_extrapolated, diff);
      const double da = std::abs(oracle[a][i] - targets[i]), db = std::abs(oracle[b][i] - targets[i]);
      cmp.observed_order.push_back(std::log(da / db) / std::log(ha / hb));
    }
  }
  return cmp;
}

}  // namespace edsl
