#include "edsl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edsl/errors.hpp"
#include "edsl/quadrature.hpp"

namespace edsl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Index of the grid cell containing x (clamped to a valid cell).
std::size_t grid_cell(const GridTerm& g, double x) {
  auto it = std::upper_bound(g.nodes.begin(), g.nodes.end(), x);
  std::size_t k = static_cast<std::size_t>(std::distance(g.nodes.begin(), it));
  if (k == 0) return 0;
  return std::min(k - 1, g.nodes.size() - 2);
}

cplx grid_value(const GridTerm& g, double x) {
  const std::size_t k = grid_cell(g, x);
  const double t = (x - g.nodes[k]) / (g.nodes[k + 1] - g.nodes[k]);
  return g.values[k] + t * (g.values[k + 1] - g.values[k]);
}

cplx grid_integral(const GridTerm& g, double x) {
  if (x <= 0.0) return 0.0;
  const std::size_t k = grid_cell(g, x);
  const cplx fx = grid_value(g, x);
  return g.cumulative[k] + 0.5 * (x - g.nodes[k]) * (g.values[k] + fx);
}

void fill_cumulative(GridTerm& g) {
  g.cumulative.assign(g.nodes.size(), 0.0);
  for (std::size_t k = 0; k + 1 < g.nodes.size(); ++k)
    g.cumulative[k + 1] =
        g.cumulative[k] + 0.5 * (g.nodes[k + 1] - g.nodes[k]) * (g.values[k] + g.values[k + 1]);
}

cplx poly_value(const PolyTerm& p, double x) {
  cplx acc = 0.0;
  for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// (s ln|s| - s), continuous with value 0 at s = 0.
double xlogx_minus_x(double s) {
  if (s == 0.0) return 0.0;
  return s * std::log(std::abs(s)) - s;
}

cplx term_value(const PotentialTerm& term, double x, bool left) {
  return std::visit(
      overloaded{
          [&](const GridTerm& g) { return grid_value(g, x); },
          [&](const PolyTerm& p) { return poly_value(p, x); },
          [&](const StepTerm& s) -> cplx {
            const bool on = left ? (x > s.x0) : (x >= s.x0);
            return on ? s.jump : cplx(0.0);
          },
          [&](const LogTerm& l) -> cplx {
            if (x == l.x0) throw InvalidInput("singular point: log term evaluated at its center", "x");
            return l.strength * std::log(std::abs(x - l.x0));
          },
      },
      term);
}

cplx term_integral(const PotentialTerm& term, double x) {
  return std::visit(overloaded{
                        [&](const GridTerm& g) { return grid_integral(g, x); },
                        [&](const PolyTerm& p) {
                          cplx acc = 0.0;
                          for (std::size_t k = p.coefficients.size(); k-- > 0;)
                            acc = acc * x + p.coefficients[k] / static_cast<double>(k + 1);
                          return acc * x;
                        },
                        [&](const StepTerm& s) { return s.jump * std::max(0.0, x - s.x0); },
                        [&](const LogTerm& l) {
                          return l.strength * (xlogx_minus_x(x - l.x0) - xlogx_minus_x(-l.x0));
                        },
                    },
                    term);
}

void check_unit_interval(double x, const char* field) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput(std::string(field) + " must lie in [0,1]", field);
}

// Abscissae on [0,1] accumulating toward c with spacing sqrt(8 eps d) at
// distance d, so linear interpolation of s ln|s| - s is accurate to ~eps.
std::vector<double> graded_nodes(double c, double eps) {
  std::vector<double> xs{0.0, 1.0, c};
  double d = std::max(c, 1.0 - c);
  while (d > 1e-14) {
    if (c - d >= 0.0) xs.push_back(c - d);
    if (c + d <= 1.0) xs.push_back(c + d);
    d -= std::sqrt(8.0 * eps * d);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

PotentialTerm make_grid(std::vector<double> nodes, std::vector<cplx> values) {
  if (nodes.size() < 2) throw InvalidInput("grid term needs at least two nodes", "nodes");
  if (nodes.size() != values.size()) throw InvalidInput("grid nodes and values differ in length", "values");
  if (nodes.front() != 0.0 || nodes.back() != 1.0)
    throw InvalidInput("grid nodes must start at 0 and end at 1", "nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw InvalidInput("grid nodes must be strictly increasing", "nodes");
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidInput("grid values must be finite", "values");
  return GridTerm{std::move(nodes), std::move(values), {}};
}

PotentialTerm make_poly(std::vector<cplx> coefficients) {
  for (const auto& c : coefficients)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw InvalidInput("polynomial coefficients must be finite", "coefficients");
  return PolyTerm{std::move(coefficients)};
}

PotentialTerm make_step(double x0, cplx jump) {
  if (!(x0 > 0.0 && x0 < 1.0)) throw InvalidInput("step abscissa must lie strictly inside (0,1)", "x0");
  return StepTerm{x0, jump};
}

PotentialTerm make_log(double x0, cplx strength) {
  check_unit_interval(x0, "x0");
  return LogTerm{x0, strength};
}

Potential::Potential(std::vector<PotentialTerm> terms) : terms_(std::move(terms)) {
  for (auto& t : terms_)
    if (auto* g = std::get_if<GridTerm>(&t)) fill_cumulative(*g);
}

Potential Potential::constant(cplx c) { return Potential({PolyTerm{{c}}}); }

cplx Potential::operator()(double x) const {
  cplx acc = 0.0;
  for (const auto& t : terms_) acc += term_value(t, x, false);
  return acc;
}

cplx Potential::left_limit(double x) const {
  cplx acc = 0.0;
  for (const auto& t : terms_) acc += term_value(t, x, true);
  return acc;
}

cplx Potential::integral(double x) const {
  cplx acc = 0.0;
  for (const auto& t : terms_) acc += term_integral(t, x);
  return acc;
}

cplx Potential::smooth_derivative(double x) const {
  cplx acc = 0.0;
  for (const auto& term : terms_) {
    std::visit(overloaded{
                   [&](const GridTerm& g) {
                     // average of the one-sided slopes at a node, plain slope inside a cell
                     auto slope = [&](std::size_t k) {
                       return (g.values[k + 1] - g.values[k]) / (g.nodes[k + 1] - g.nodes[k]);
                     };
                     const std::size_t k = grid_cell(g, x);
                     if (x == g.nodes[k] && k > 0)
                       acc += 0.5 * (slope(k - 1) + slope(k));
                     else
                       acc += slope(k);
                   },
                   [&](const PolyTerm& p) {
                     cplx d = 0.0;
                     for (std::size_t k = p.coefficients.size(); k-- > 1;)
                       d = d * x + static_cast<double>(k) * p.coefficients[k];
                     acc += d;
                   },
                   [&](const StepTerm&) {},
                   [&](const LogTerm&) {
                     throw InvalidInput("unsupported singular term: log term has no smooth derivative", "type");
                   },
               },
               term);
  }
  return acc;
}

std::vector<StepTerm> Potential::steps() const {
  std::vector<StepTerm> out;
  for (const auto& t : terms_)
    if (const auto* s = std::get_if<StepTerm>(&t)) out.push_back(*s);
  return out;
}

std::vector<double> Potential::log_centers() const {
  std::vector<double> out;
  for (const auto& t : terms_)
    if (const auto* l = std::get_if<LogTerm>(&t)) out.push_back(l->x0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> Potential::breakpoints() const {
  std::vector<double> out = log_centers();
  for (const auto& s : steps()) out.push_back(s.x0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Potential::is_real() const {
  for (const auto& term : terms_) {
    const bool real = std::visit(
        overloaded{
            [](const GridTerm& g) {
              return std::all_of(g.values.begin(), g.values.end(), [](cplx v) { return v.imag() == 0.0; });
            },
            [](const PolyTerm& p) {
              return std::all_of(p.coefficients.begin(), p.coefficients.end(),
                                 [](cplx v) { return v.imag() == 0.0; });
            },
            [](const StepTerm& s) { return s.jump.imag() == 0.0; },
            [](const LogTerm& l) { return l.strength.imag() == 0.0; },
        },
        term);
    if (!real) return false;
  }
  return true;
}

bool Potential::has_log_terms() const { return !log_centers().empty(); }

double Potential::l1_norm() const {
  auto f = [&](double x) { return std::abs((*this)(x)); };
  return quad::integrate_split(f, 0.0, 1.0, breakpoints(), 1e-12);
}

double Potential::l2_norm() const {
  auto f = [&](double x) { return std::norm((*this)(x)); };
  return std::sqrt(quad::integrate_split(f, 0.0, 1.0, breakpoints(), 1e-12));
}

Potential Potential::antiderivative() const {
  std::vector<PotentialTerm> out;
  for (const auto& term : terms_) {
    std::visit(overloaded{
                   [&](const GridTerm& g) {
                     // the antiderivative is piecewise quadratic; sample it finely enough that
                     // linear interpolation is accurate to ~1e-11
                     std::vector<double> xs;
                     std::vector<cplx> vs;
                     cplx acc = 0.0;
                     for (std::size_t k = 0; k + 1 < g.nodes.size(); ++k) {
                       const double a = g.nodes[k];
                       const double h = g.nodes[k + 1] - a;
                       const cplx fa = g.values[k];
                       const cplx slope = (g.values[k + 1] - fa) / h;
                       const int sub = std::clamp(static_cast<int>(std::ceil(h * std::sqrt(std::abs(slope) / 8e-11))), 1, 1 << 17);
                       for (int j = 0; j < sub; ++j) {
                         const double t = h * j / sub;
                         xs.push_back(a + t);
                         vs.push_back(acc + fa * t + 0.5 * slope * t * t);
                       }
                       acc += 0.5 * h * (fa + g.values[k + 1]);
                     }
                     xs.push_back(1.0);
                     vs.push_back(acc);
                     out.push_back(GridTerm{std::move(xs), std::move(vs), {}});
                   },
                   [&](const PolyTerm& p) {
                     std::vector<cplx> c(p.coefficients.size() + 1, 0.0);
                     for (std::size_t k = 0; k < p.coefficients.size(); ++k)
                       c[k + 1] = p.coefficients[k] / static_cast<double>(k + 1);
                     out.push_back(PolyTerm{std::move(c)});
                   },
                   [&](const StepTerm& s) {
                     out.push_back(GridTerm{{0.0, s.x0, 1.0}, {0.0, 0.0, s.jump * (1.0 - s.x0)}, {}});
                   },
                   [&](const LogTerm& l) {
                     std::vector<double> xs = graded_nodes(l.x0, 1e-10);
                     std::vector<cplx> vs;
                     vs.reserve(xs.size());
                     for (double x : xs) vs.push_back(term_integral(l, x));
                     out.push_back(GridTerm{std::move(xs), std::move(vs), {}});
                   },
               },
               term);
  }
  return Potential(std::move(out));
}

Potential Potential::operator+(const Potential& other) const {
  std::vector<PotentialTerm> t = terms_;
  t.insert(t.end(), other.terms_.begin(), other.terms_.end());
  return Potential(std::move(t));
}

Potential Potential::scaled(cplx factor) const {
  std::vector<PotentialTerm> out;
  out.reserve(terms_.size());
  for (const auto& term : terms_) {
    out.push_back(std::visit(overloaded{
                                 [&](GridTerm g) -> PotentialTerm {
                                   for (auto& v : g.values) v *= factor;
                                   return g;
                                 },
                                 [&](PolyTerm p) -> PotentialTerm {
                                   for (auto& c : p.coefficients) c *= factor;
                                   return p;
                                 },
                                 [&](StepTerm s) -> PotentialTerm {
                                   s.jump *= factor;
                                   return s;
                                 },
                                 [&](LogTerm l) -> PotentialTerm {
                                   l.strength *= factor;
                                   return l;
                                 },
                             },
                             term));
  }
  return Potential(std::move(out));
}

Problem::Problem(Potential p, Potential r, BoundaryCondition bc, cplx h, cplx shift)
    : p_(std::move(p)), r_(std::move(r)), bc_(bc), h_(h), shift_(shift) {
  if (bc_ == BoundaryCondition::mixed && !(std::isfinite(h_.real()) && std::isfinite(h_.imag())))
    throw InvalidInput("mixed boundary parameter h must be finite", "h");
  p0_ = p_.integral(1.0);
}

std::vector<double> Problem::breakpoints() const {
  std::vector<double> out = p_.breakpoints();
  for (double b : r_.breakpoints()) out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

cplx evaluate(const Potential& f, double x) { return f(x); }

cplx integral_p(const Problem& problem, double x) { return problem.p().integral(x); }

Problem shift_parameter(const Problem& problem, cplx lambda0) {
  if (lambda0 == 0.0) return problem;
  Potential p = problem.p() + Potential::constant(lambda0);
  Potential r = problem.r() + problem.p().antiderivative().scaled(-2.0 * lambda0) +
                Potential({PolyTerm{{0.0, -lambda0 * lambda0}}});
  // y^[1] gains (2 lambda0 int_0^x p + lambda0^2 x) y, so the right-end condition moves with it
  const cplx h = problem.h() - 2.0 * lambda0 * problem.p().integral(1.0) - lambda0 * lambda0;
  return Problem(std::move(p), std::move(r), problem.bc(), h, problem.shift() + lambda0);
}

}  // namespace edsl
