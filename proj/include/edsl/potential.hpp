#pragma once

#include <complex>
#include <variant>
#include <vector>

namespace edsl {

using cplx = std::complex<double>;

// Piecewise-linear interpolant through (nodes, values); nodes strictly
// increasing with nodes.front() == 0 and nodes.back() == 1.
struct GridTerm {
  std::vector<double> nodes;
  std::vector<cplx> values;
  std::vector<cplx> cumulative;  // integral up to each node, filled by Potential
};

// c[0] + c[1] x + c[2] x^2 + ...
struct PolyTerm {
  std::vector<cplx> coefficients;
};

// 0 for x < x0, jump for x >= x0. In r this encodes jump * delta(x - x0) in q.
struct StepTerm {
  double x0;
  cplx jump;
};

// strength * ln|x - x0|. In r this encodes strength / (x - x0) in q.
struct LogTerm {
  double x0;
  cplx strength;
};

using PotentialTerm = std::variant<GridTerm, PolyTerm, StepTerm, LogTerm>;

// Validating constructors; they throw InvalidInput naming the offending field.
PotentialTerm make_grid(std::vector<double> nodes, std::vector<cplx> values);
PotentialTerm make_poly(std::vector<cplx> coefficients);
PotentialTerm make_step(double x0, cplx jump);
PotentialTerm make_log(double x0, cplx strength);

// A sum of terms on [0,1]. Immutable after construction.
class Potential {
 public:
  Potential() = default;
  explicit Potential(std::vector<PotentialTerm> terms);

  static Potential constant(cplx c);
  static Potential zero() { return {}; }

  const std::vector<PotentialTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  // Right-continuous value. Throws InvalidInput at a log center.
  cplx operator()(double x) const;
  cplx left_limit(double x) const;

  // Integral over [0, x], term-wise closed form.
  cplx integral(double x) const;

  // Derivative of the smooth part (polynomial and grid terms); steps are
  // ignored and log terms are rejected.
  cplx smooth_derivative(double x) const;

  std::vector<StepTerm> steps() const;
  std::vector<double> log_centers() const;
  // Step abscissae and log centers, sorted and unique.
  std::vector<double> breakpoints() const;

  bool is_real() const;
  bool has_log_terms() const;

  double l1_norm() const;
  double l2_norm() const;

  // Antiderivative F(x) = integral(x), itself represented term-wise. Steps
  // become exact three-node grids, grids become refined grids and log terms a
  // graded grid of the closed-form antiderivative.
  Potential antiderivative() const;

  Potential operator+(const Potential& other) const;
  Potential scaled(cplx factor) const;

 private:
  std::vector<PotentialTerm> terms_;
};

enum class BoundaryCondition { dirichlet, mixed };

// The spectral problem -y'' + q y + 2 lambda p y = lambda^2 y on (0,1), q = r'.
// Dirichlet: y(0) = y(1) = 0. Mixed: y(0) = y^[1](1) + h y(1) = 0.
class Problem {
 public:
  Problem(Potential p, Potential r, BoundaryCondition bc = BoundaryCondition::dirichlet,
          cplx h = 0.0, cplx shift = 0.0);

  const Potential& p() const noexcept { return p_; }
  const Potential& r() const noexcept { return r_; }
  BoundaryCondition bc() const noexcept { return bc_; }
  cplx h() const noexcept { return h_; }
  // Cumulative spectral shift: eigenvalues of this problem equal the
  // eigenvalues of the originally posed problem plus shift().
  cplx shift() const noexcept { return shift_; }
  cplx p0() const noexcept { return p0_; }

  bool is_real() const { return p_.is_real() && r_.is_real() && h_.imag() == 0.0; }
  std::vector<double> breakpoints() const;

 private:
  Potential p_;
  Potential r_;
  BoundaryCondition bc_;
  cplx h_;
  cplx shift_;
  cplx p0_;
};

cplx evaluate(const Potential& f, double x);
cplx integral_p(const Problem& problem, double x);

// Replaces p by p + lambda0 and q by q - 2 lambda0 p - lambda0^2, i.e.
// r by r - 2 lambda0 (int_0^x p) - lambda0^2 x. Every eigenvalue lambda of the
// input becomes lambda + lambda0.
Problem shift_parameter(const Problem& problem, cplx lambda0);

}  // namespace edsl
