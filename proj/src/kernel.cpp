#include "edsl/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "edsl/errors.hpp"
#include "edsl/quadrature.hpp"

namespace edsl {

namespace {

constexpr int kPanelOrder = 12;

std::vector<double> bad_points(const DiracPotential& dp) {
  std::vector<double> pts = dp.mesh.breakpoints;
  pts.insert(pts.end(), dp.mesh.singular.begin(), dp.mesh.singular.end());
  std::sort(pts.begin(), pts.end());
  return pts;
}

// Splits for t -> Qt(s + t) Qt(t) on [0, x - s].
std::vector<double> shifted_splits(const std::vector<double>& bad, double s) {
  std::vector<double> out = bad;
  for (double b : bad) out.push_back(b - s);
  std::sort(out.begin(), out.end());
  return out;
}

// Integration matrix of the Gauss rule: S[i][j] = int_{-1}^{t_i} l_j.
std::vector<double> integration_matrix(const quad::GaussRule& g) {
  const int m = static_cast<int>(g.nodes.size());
  auto legendre = [m](double x) {
    std::vector<double> P(m + 1);
    P[0] = 1.0;
    P[1] = x;
    for (int k = 2; k <= m; ++k) P[k] = ((2 * k - 1) * x * P[k - 1] - (k - 1) * P[k - 2]) / k;
    return P;
  };
  std::vector<double> S(m * m, 0.0);
  for (int i = 0; i < m; ++i) {
    const auto Pi = legendre(g.nodes[i]);
    std::vector<double> ip(m);
    ip[0] = g.nodes[i] + 1.0;
    for (int k = 1; k < m; ++k) ip[k] = (Pi[k + 1] - Pi[k - 1]) / (2 * k + 1);
    for (int j = 0; j < m; ++j) {
      const auto Pj = legendre(g.nodes[j]);
      double acc = 0.0;
      for (int k = 0; k < m; ++k) acc += g.weights[j] * Pj[k] * (2 * k + 1) / 2.0 * ip[k];
      S[i * m + j] = acc;
    }
  }
  return S;
}

std::vector<Mat2> neumann_on(const DiracPotential& dp, cplx lambda, int N, int cpu) {
  static const quad::GaussRule g = quad::gauss_legendre(kPanelOrder);
  static const std::vector<double> S = integration_matrix(g);
  const int m = kPanelOrder;
  const auto mesh = build_mesh(dp.mesh, cpu);
  const std::size_t panels = mesh.size() - 1;
  const Mat2 J = dirac_J();
  auto a = [&](double x) { return dp.int_p(x) - lambda * x; };
  // Panel-local frame: with E(s) = e^{(a(s) - a(x_k)) J} on panel k,
  //   U_n(x) = E(x) (U_n(x_k) + int_{x_k}^x E(s)^{-1} J Q(s) U_{n-1}(s) ds).
  std::vector<Mat2> E(panels * m), F(panels * m), Eend(panels);
  std::vector<double> half(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    half[k] = 0.5 * (mesh[k + 1] - mesh[k]);
    const cplx ak = a(mesh[k]);
    Eend[k] = expJ(a(mesh[k + 1]) - ak);
    for (int i = 0; i < m; ++i) {
      const double s = mesh[k] + half[k] * (g.nodes[i] + 1.0);
      // ulp-wide panels next to a log center: nodes would round onto it, share negligible
      if (half[k] < 5e-14) {
        E[k * m + i] = Mat2::Identity();
        F[k * m + i] = Mat2::Zero();
        continue;
      }
      const cplx t = a(s) - ak;
      E[k * m + i] = expJ(t);
      F[k * m + i] = expJ(-t) * J * dp.Q(s);
    }
  }
  std::vector<Mat2> prev(panels * m);
  for (std::size_t k = 0; k < panels; ++k)
    for (int i = 0; i < m; ++i) prev[k * m + i] = expJ(a(mesh[k] + half[k] * (g.nodes[i] + 1.0)));
  std::vector<Mat2> cur(panels * m);
  std::vector<Mat2> out{expJ(a(1.0))};
  std::vector<Mat2> G(m);
  for (int n = 1; n <= N; ++n) {
    Mat2 left = Mat2::Zero();  // U_n(x_k)
    for (std::size_t k = 0; k < panels; ++k) {
      for (int j = 0; j < m; ++j) G[j] = F[k * m + j] * prev[k * m + j];
      for (int i = 0; i < m; ++i) {
        Mat2 acc = Mat2::Zero();
        for (int j = 0; j < m; ++j) acc += S[i * m + j] * G[j];
        cur[k * m + i] = E[k * m + i] * (left + half[k] * acc);
      }
      Mat2 acc = Mat2::Zero();
      for (int j = 0; j < m; ++j) acc += g.weights[j] * G[j];
      left = (Eend[k] * (left + half[k] * acc)).eval();
    }
    out.push_back(left);
    std::swap(prev, cur);
  }
  return out;
}

}  // namespace

double norm2(const Mat2& m) {
  const double f2 = m.squaredNorm();
  const double d = std::abs(m.determinant());
  return std::sqrt(0.5 * (f2 + std::sqrt(std::max(0.0, f2 * f2 - 4.0 * d * d))));
}

Mat2 expJ(cplx t) {
  Mat2 e;
  const cplx c = std::cos(t), s = std::sin(t);
  e << c, s, -s, c;
  return e;
}

Mat2 Qtilde(const DiracPotential& dp, double t) {
  return expJ(-2.0 * dp.int_p(t)) * dirac_J() * dp.Q(t);
}

double KernelSeries::tail(int N) const {
  if (N < 0) throw InvalidInput("truncation order must be non-negative", "N");
  const double q = Qtilde_norm;
  if (q == 0.0) return 0.0;
  // q * sum_{m >= N} q^m / m!
  double term = 1.0;
  for (int k = 1; k <= N; ++k) term *= q / k;
  double sum = 0.0;
  for (int k = N; k < N + 2000; ++k) {
    sum += term;
    if (term <= 1e-17 * sum && k > q) break;
    term *= q / (k + 1);
  }
  return std::exp(p_l1) * q * sum;
}

KernelSeries kernel_series(const DiracPotential& dp, double tol) {
  KernelSeries ks;
  const auto f = [&](double t) {
    const double n = norm2(Qtilde(dp, t));
    return n * n;
  };
  ks.Qtilde_norm = std::sqrt(quad::integrate_split(f, 0.0, 1.0, bad_points(dp), tol));
  ks.p_l1 = dp.p.l1_norm();
  return ks;
}

Mat2 NeumannTerms::partial_sum(int N) const {
  if (N < 0 || N >= static_cast<int>(terms.size())) throw InvalidInput("truncation order out of range", "N");
  Mat2 s = Mat2::Zero();
  for (int n = 0; n <= N; ++n) s += terms[n];
  return s;
}

NeumannTerms neumann_terms(const DiracPotential& dp, cplx lambda, int N, double tol) {
  if (N < 0) throw InvalidInput("truncation order must be non-negative", "N");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive", "tol");
  int cpu = std::max(8, static_cast<int>(std::ceil(std::abs(lambda))));
  NeumannTerms prev{neumann_on(dp, lambda, N, cpu)};
  for (int level = 0; level < 8; ++level) {
    cpu *= 2;
    NeumannTerms cur{neumann_on(dp, lambda, N, cpu)};
    const Mat2 s = cur.partial_sum(N);
    const double diff = detail::max_abs(s - prev.partial_sum(N));
    if (!std::isfinite(diff)) throw NumericalFailure("non-finite Neumann terms");
    if (diff <= tol * std::max(1.0, detail::max_abs(s))) return cur;
    prev = std::move(cur);
  }
  throw NumericalFailure("tolerance not reached: Neumann terms");
}

KernelValue kernel_K1K2(const DiracPotential& dp, double x, double s, double tol) {
  if (!(x <= 1.0 && s >= 0.0 && s < x)) throw InvalidInput("kernel requires 0 <= s < x <= 1", "s");
  const Mat2 ep = expJ(dp.int_p(x));
  const auto f = [&](double t) -> Mat2 { return Qtilde(dp, s + t) * Qtilde(dp, t); };
  const Mat2 inner = quad::integrate_split(f, 0.0, x - s, shifted_splits(bad_points(dp), s), tol);
  return {ep * Qtilde(dp, s), ep * inner};
}

RepresentationCheck verify_representation(const DiracPotential& dp, cplx lambda, int N, KernelRoute route,
                                          double tol) {
  if (route == KernelRoute::kernel && (N < 1 || N > 2))
    throw InvalidInput("kernel route supports N = 1 or 2", "N");
  const FundamentalSolution fs = solve_U(dp, lambda, 0.1 * tol, false);
  RepresentationCheck rc;
  rc.tail = kernel_series(dp, 1e-8).tail(N);
  rc.bound = std::exp(std::abs(lambda.imag())) * rc.tail;
  Mat2 approx;
  if (route == KernelRoute::neumann) {
    approx = neumann_terms(dp, lambda, N, tol).partial_sum(N);
  } else {
    const auto f = [&](double s) -> Mat2 {
      const KernelValue k = kernel_K1K2(dp, 1.0, s, 0.1 * tol);
      const Mat2 K = N == 1 ? k.K1 : Mat2(k.K1 + k.K2);
      return expJ(-lambda * (1.0 - 2.0 * s)) * K;
    };
    approx = expJ(dp.int_p(1.0) - lambda) + quad::integrate_split(f, 0.0, 1.0, bad_points(dp), tol);
  }
  rc.defect = norm2(fs.at_end() - approx);
  return rc;
}

ContinuityCheck continuity_modulus(const DiracPotential& dp, double x1, double x2, double tol) {
  if (!(0.0 <= x1 && x1 < x2 && x2 <= 1.0)) throw InvalidInput("need 0 <= x1 < x2 <= 1", "x");
  const auto bad = bad_points(dp);
  const auto prod = [&](double s) { return [&dp, s](double t) -> Mat2 { return Qtilde(dp, s + t) * Qtilde(dp, t); }; };
  const auto diff2 = [&](double s) {
    Mat2 d;
    if (s < x1) {
      d = quad::integrate_split(prod(s), x1 - s, x2 - s, shifted_splits(bad, s), tol);
    } else {
      d = Qtilde(dp, s) + quad::integrate_split(prod(s), 0.0, x2 - s, shifted_splits(bad, s), tol);
    }
    const double n = norm2(d);
    return n * n;
  };
  std::vector<double> splits = bad;
  splits.push_back(x1);
  for (double b : bad) {
    splits.push_back(b - x1);
    splits.push_back(b - x2);
  }
  std::sort(splits.begin(), splits.end());
  ContinuityCheck cc;
  cc.measured = std::sqrt(quad::integrate_split(diff2, 0.0, x2, splits, tol));
  const auto q2 = [&](double t) {
    const double n = norm2(Qtilde(dp, t));
    return n * n;
  };
  const double a = std::sqrt(quad::integrate_split(q2, x1, x2, bad, tol));
  cc.bound = (1.0 + kernel_series(dp, 1e-8).Qtilde_norm) * a;
  return cc;
}

double anticommutation_defect(const DiracPotential& dp, cplx t, double s) {
  const Mat2 q = Qtilde(dp, s);
  return norm2(expJ(-t) * q - q * expJ(t));
}

Vec2 transform_free_solution(const DiracPotential& dp, cplx lambda, double x, double tol) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("x must lie in [0, 1]", "x");
  Mat2 u = expJ(dp.int_p(x) - lambda * x);
  if (x > 0.0) {
    const auto f = [&](double s) -> Mat2 {
      const KernelValue k = kernel_K1K2(dp, x, s, 0.1 * tol);
      return expJ(-lambda * (x - 2.0 * s)) * (k.K1 + k.K2);
    };
    u += quad::integrate_split(f, 0.0, x, bad_points(dp), tol);
  }
  return u.col(0);
}

}  // namespace edsl
