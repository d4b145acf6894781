#include "edsl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edsl/errors.hpp"
#include "edsl/quadrature.hpp"

namespace edsl {

namespace {

constexpr double kPi = std::numbers::pi;

cplx char_at_origin_branch(const Problem& problem, cplx lambda, double tol) {
  return char_quasi(problem, lambda, problem.bc(), problem.h(), tol).value;
}

// Counterclockwise path z(t), t in [0, 1].
template <class Path>
double winding(const CharFunction& f, const Path& path, double length, double tol) {
  double t = 0.0;
  CharValue fa = f(path(0.0));
  if (!std::isfinite(std::abs(fa.value))) throw NumericalFailure("non-finite characteristic function");
  if (std::abs(fa.value) == 0.0) throw NumericalFailure("zero on contour");
  double total = 0.0;
  double dt = 1.0 / 16.0;
  // a zero closer than about tol * length to the path stalls the phase tracking
  const double dt_min = 1e-4 * tol;
  while (t < 1.0) {
    const double rate = std::abs(fa.derivative / fa.value) * length;
    dt = std::min({dt, 0.3 / std::max(rate, 1e-3), 1.0 / 8.0, 1.0 - t});
    for (;;) {
      if (dt < dt_min) throw NumericalFailure("zero on contour");
      const CharValue fb = f(path(t + dt));
      if (std::abs(fb.value) == 0.0) throw NumericalFailure("zero on contour");
      const double darg = std::arg(fb.value / fa.value);
      const double rate_b = std::abs(fb.derivative / fb.value) * length;
      if (std::abs(darg) < 0.8 && rate_b * dt < 0.6) {
        total += darg;
        t += dt;
        fa = fb;
        dt *= 2.0;
        break;
      }
      dt *= 0.5;
    }
  }
  const double w = total / (2.0 * kPi);
  if (std::abs(w - std::round(w)) > 0.25) throw NumericalFailure("winding number not resolved");
  return w;
}

int rect_winding(const CharFunction& f, const Rectangle& r, double tol) {
  const double w = r.re1 - r.re0, h = r.im1 - r.im0;
  const double per = 2.0 * (w + h);
  auto path = [&](double t) {
    double s = t * per;
    if (s <= w) return cplx(r.re0 + s, r.im0);
    s -= w;
    if (s <= h) return cplx(r.re1, r.im0 + s);
    s -= h;
    if (s <= w) return cplx(r.re1 - s, r.im1);
    s -= w;
    return cplx(r.re0, r.im1 - s);
  };
  return static_cast<int>(std::lround(winding(f, path, per, tol)));
}

int circle_winding(const CharFunction& f, const Circle& c, double tol) {
  auto path = [&](double t) { return c.center + c.radius * std::exp(cplx(0.0, 2.0 * kPi * t)); };
  return static_cast<int>(std::lround(winding(f, path, 2.0 * kPi * c.radius, tol)));
}

// Newton from z0 kept inside the disc |z - center| <= radius.
std::optional<RefineResult> newton(cplx z0, const CharFunction& f, double tol, cplx center, double radius) {
  cplx z = z0;
  CharValue fz = f(z);
  int mult = 1;
  double prev_step = 0.0;
  int linear_hits = 0;
  for (int it = 1; it <= 80; ++it) {
    if (fz.value == 0.0) return RefineResult{z, mult, it};
    if (fz.derivative == 0.0) return std::nullopt;
    cplx step = static_cast<double>(mult) * fz.value / fz.derivative;
    if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
    const double sz = std::abs(step);
    // slow linear convergence signals a multiple zero
    if (prev_step > 0.0) {
      const double ratio = sz / prev_step;
      if (ratio > 0.3 && ratio < 0.95 && sz < 1e-2) {
        if (++linear_hits >= 3 && mult < 4) {
          mult = std::max(mult + 1, static_cast<int>(std::lround(1.0 / (1.0 - ratio))));
          mult = std::min(mult, 4);
          linear_hits = 0;
        }
      } else {
        linear_hits = 0;
      }
    }
    prev_step = sz;
    cplx zn = z - step;
    CharValue fn = f(zn);
    for (int k = 0; k < 6 && std::abs(fn.value) > std::abs(fz.value); ++k) {
      step *= 0.5;
      zn = z - step;
      fn = f(zn);
    }
    if (std::abs(zn - center) > radius) return std::nullopt;
    const bool stalled = std::abs(fn.value) >= std::abs(fz.value);
    z = zn;
    fz = fn;
    if (std::abs(step) <= tol * (1.0 + std::abs(z))) return RefineResult{z, mult, it};
    // at a multiple zero the value hits its noise floor before the step gets small
    if (stalled && mult > 1 && std::abs(step) <= std::sqrt(tol) * (1.0 + std::abs(z)))
      return RefineResult{z, mult, it};
    if (stalled && std::abs(step) <= 1e3 * tol * (1.0 + std::abs(z))) return RefineResult{z, mult, it};
  }
  return std::nullopt;
}

// Argument-principle search: isolate a zero in the box by quadrisection, then polish.
std::optional<RefineResult> box_search(const CharFunction& f, const Rectangle& box, double tol, int depth,
                                       double contour_tol) {
  const double w = box.re1 - box.re0;
  const cplx c(0.5 * (box.re0 + box.re1), 0.5 * (box.im0 + box.im1));
  if (w < 1e-3 || depth <= 0) return newton(c, f, tol, c, 2.0 * w + 1e-3);
  // off-centre cuts: real data put zeros on the symmetry line Im = 0
  const double xm = box.re0 + 0.4871 * (box.re1 - box.re0), ym = box.im0 + 0.4623 * (box.im1 - box.im0);
  const Rectangle parts[4] = {{box.re0, xm, box.im0, ym},
                              {xm, box.re1, box.im0, ym},
                              {box.re0, xm, ym, box.im1},
                              {xm, box.re1, ym, box.im1}};
  for (const auto& q : parts) {
    int n = 0;
    try {
      n = count_zeros(f, q, contour_tol);
    } catch (const NumericalFailure&) {
      n = 1;  // a zero on this edge: search it
    }
    if (n <= 0) continue;
    if (auto r = newton(cplx(0.5 * (q.re0 + q.re1), 0.5 * (q.im0 + q.im1)), f, tol,
                        cplx(0.5 * (q.re0 + q.re1), 0.5 * (q.im0 + q.im1)), q.re1 - q.re0))
      return r;
    if (auto r = box_search(f, q, tol, depth - 1, contour_tol)) return r;
  }
  return std::nullopt;
}

}  // namespace

double assumption_A_threshold(const Problem& problem, double tol) {
  const double s = std::max({1.0, std::abs(char_at_origin_branch(problem, 0.3, tol)),
                             std::abs(char_at_origin_branch(problem, -0.3, tol))});
  return 1e-6 * s;
}

Problem ensure_assumption_A(const Problem& problem, double tol) {
  if (std::abs(char_at_origin_branch(problem, 0.0, tol)) >= assumption_A_threshold(problem, tol)) return problem;
  for (cplx l0 : {cplx(0.37), cplx(0.0, 0.73), cplx(0.37, 0.73)}) {
    Problem shifted = shift_parameter(problem, l0);
    if (std::abs(char_at_origin_branch(shifted, 0.0, tol)) >= assumption_A_threshold(shifted, tol)) return shifted;
  }
  throw NumericalFailure("cannot satisfy (A)");
}

cplx initial_guess(int n, cplx p0, BoundaryCondition bc) {
  if (bc == BoundaryCondition::dirichlet) {
    if (n == 0) throw InvalidInput("Dirichlet eigenvalues are labelled by nonzero integers", "n");
    return kPi * n + p0;
  }
  return kPi * (n + 0.5) + p0;
}

RefineResult refine(cplx guess, const CharFunction& f, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive", "tol");
  if (auto r = newton(guess, f, tol, guess, 1.0)) return *r;
  const Rectangle box{guess.real() - 1.0, guess.real() + 1.0, guess.imag() - 1.0, guess.imag() + 1.0};
  if (auto r = box_search(f, box, tol, 12, 1e-6))
    if (std::abs(r->lambda - guess) <= std::sqrt(2.0)) return *r;
  throw NumericalFailure("did not converge within radius 1 of guess");
}

int count_zeros(const CharFunction& f, const Rectangle& rect, double tol) {
  if (!(rect.re1 > rect.re0 && rect.im1 > rect.im0)) throw InvalidInput("degenerate rectangle", "rectangle");
  const double d = 1e-3 * std::min(rect.re1 - rect.re0, rect.im1 - rect.im0);
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double e = d * attempt;
    try {
      return rect_winding(f, {rect.re0 - e, rect.re1 + e, rect.im0 - e, rect.im1 + e}, tol);
    } catch (const NumericalFailure&) {
      if (attempt == 3) throw NumericalFailure("zero on contour");
    }
  }
  throw NumericalFailure("zero on contour");
}

int count_zeros(const CharFunction& f, const Circle& circle, double tol) {
  if (!(circle.radius > 0.0)) throw InvalidInput("radius must be positive", "radius");
  for (int attempt = 0; attempt < 4; ++attempt) {
    try {
      return circle_winding(f, {circle.center, circle.radius * (1.0 + 1e-3 * attempt)}, tol);
    } catch (const NumericalFailure&) {
      if (attempt == 3) throw NumericalFailure("zero on contour");
    }
  }
  throw NumericalFailure("zero on contour");
}

}  // namespace edsl

namespace edsl {

namespace {

struct Root {
  cplx lambda;
  int multiplicity;
};

bool same_root(cplx a, cplx b) { return std::abs(a - b) <= 1e-7 * (1.0 + std::abs(a)); }

void add_root(std::vector<Root>& roots, const RefineResult& r) {
  for (const auto& x : roots)
    if (same_root(x.lambda, r.lambda)) return;
  roots.push_back({r.lambda, r.multiplicity_hint});
}

bool inside(const Rectangle& b, cplx z) {
  return z.real() >= b.re0 && z.real() < b.re1 && z.imag() >= b.im0 && z.imag() < b.im1;
}

int known_inside(const std::vector<Root>& roots, const Rectangle& b) {
  int n = 0;
  for (const auto& r : roots)
    if (inside(b, r.lambda)) n += r.multiplicity;
  return n;
}

// Multiplicity from the winding number of a small circle.
int multiplicity_of(const CharFunction& f, cplx z, const std::vector<Root>& roots, double contour_tol) {
  double rho = 0.1;
  for (const auto& r : roots)
    if (!same_root(r.lambda, z)) rho = std::min(rho, 0.4 * std::abs(r.lambda - z));
  rho = std::max(rho, 1e-4);
  return std::max(1, count_zeros(f, Circle{z, rho}, contour_tol));
}

// Finds the zeros of f in the box that are not among the known roots.
void fill_missing(const CharFunction& f, const Rectangle& box, int count, std::vector<Root>& roots,
                  const SpectrumOptions& opt, int depth) {
  int deficit = count - known_inside(roots, box);
  if (deficit <= 0) return;
  const cplx c(0.5 * (box.re0 + box.re1), 0.5 * (box.im0 + box.im1));
  const double size = std::max(box.re1 - box.re0, box.im1 - box.im0);
  if (auto r = newton(c, f, opt.tol, c, 0.75 * size); r && inside(box, r->lambda)) {
    const std::size_t before = roots.size();
    add_root(roots, *r);
    if (roots.size() > before) {
      roots.back().multiplicity = multiplicity_of(f, r->lambda, roots, opt.contour_tol);
      deficit = count - known_inside(roots, box);
      if (deficit <= 0) return;
    }
  }
  if (depth >= opt.max_depth) throw NumericalFailure("strip count mismatch unresolved");
  // off-centre cuts: real data put zeros on the symmetry line Im = 0
  const double xm = box.re0 + 0.4871 * (box.re1 - box.re0), ym = box.im0 + 0.4623 * (box.im1 - box.im0);
  const Rectangle parts[4] = {{box.re0, xm, box.im0, ym},
                              {xm, box.re1, box.im0, ym},
                              {box.re0, xm, ym, box.im1},
                              {xm, box.re1, ym, box.im1}};
  for (const auto& q : parts) {
    const int n = count_zeros(f, q, opt.contour_tol);
    fill_missing(f, q, n, roots, opt, depth + 1);
  }
}

double natural_label(cplx lambda, cplx p0, BoundaryCondition bc) {
  const double x = (lambda - p0).real() / kPi;
  return bc == BoundaryCondition::dirichlet ? x : x - 0.5;
}

}  // namespace

CharFunction SpectralContext::charfn(double eval_tol) const {
  CharOptions o;
  o.tol = eval_tol;
  return characteristic_function(shifted, dp, o);
}

std::shared_ptr<const SpectralContext> make_context(const Problem& problem, double tol, const PrueferOptions& popt) {
  Problem shifted = ensure_assumption_A(problem, tol);
  DiracPotential dp = make_dirac(shifted, popt);
  // eigenvectors of the Dirac operator are taken with a real Miura potential when the data allow one
  DiracPotential dpo = make_dirac(problem, popt);
  if (problem.is_real()) {
    try {
      PrueferSolution ps = solve_pruefer(problem.r(), std::numbers::pi / 2.0, popt.tol);
      if (ps.margin >= popt.accept_margin) dpo = make_dirac(problem.p(), MiuraPotential(std::move(ps)));
    } catch (const NumericalFailure&) {
      // y0 has a zero on [0, 1]: keep the complex choice
    }
  }
  return std::make_shared<const SpectralContext>(
      SpectralContext{problem, std::move(shifted), std::move(dp), std::move(dpo), tol});
}

std::vector<WindowSum> dyadic_windows(const std::vector<int>& n, const std::vector<double>& values) {
  std::vector<WindowSum> out;
  for (int N = 1;; N *= 2) {
    double s = 0.0;
    int present = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const int a = std::abs(n[i]);
      if (a > N && a <= 2 * N) {
        s += values[i];
        ++present;
      }
    }
    int lo = 0, hi = 0;
    for (int v : n) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (-lo < 2 * N || hi < 2 * N || present < 2 * N) break;
    out.push_back({N, s});
  }
  return out;
}

SpectrumReport compute_spectrum(const SpectralContext& ctx, int n_min, int n_max, const SpectrumOptions& opt) {
  if (n_min > n_max) throw InvalidInput("empty index range", "n_range");
  if (!(opt.tol > 0.0)) throw InvalidInput("tolerance must be positive", "tol");
  const Problem& pr = ctx.shifted;
  const BoundaryCondition bc = pr.bc();
  const bool dirichlet = bc == BoundaryCondition::dirichlet;
  const cplx p0 = pr.p0();
  const CharFunction f = ctx.charfn(opt.tol);
  const CharFunction fc = ctx.charfn(std::max(opt.tol, opt.contour_tol));
  const int k_lo = n_min - 2, k_hi = n_max + 2;
  auto center = [&](int k) { return dirichlet ? kPi * k + p0 : kPi * (k + 0.5) + p0; };

  std::vector<Root> roots;
  double max_rem = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (dirichlet && k == 0) continue;
    const cplx g = center(k);
    try {
      const RefineResult r = refine(g, f, opt.tol);
      add_root(roots, r);
      max_rem = std::max(max_rem, std::abs(r.lambda - g));
    } catch (const NumericalFailure&) {
      // left to the strip counts
    }
  }

  // strip edges, nudged away from known zeros
  std::vector<double> edge;
  for (int k = k_lo; k <= k_hi + 1; ++k) {
    double e = center(k).real() - 0.5 * kPi;
    for (int tries = 0; tries < 8; ++tries) {
      bool close = false;
      for (const auto& r : roots) close = close || std::abs(r.lambda.real() - e) < 0.05;
      if (!close) break;
      e += 0.1;
    }
    edge.push_back(e);
  }
  const double H0 = 2.0 * (1.0 + std::abs(p0) + max_rem);
  for (auto& r : roots) r.multiplicity = multiplicity_of(fc, r.lambda, roots, opt.contour_tol);

  for (int k = k_lo; k <= k_hi; ++k) {
    const double re0 = edge[k - k_lo], re1 = edge[k - k_lo + 1];
    const bool has_origin = dirichlet && re0 <= 0.0 && 0.0 < re1;
    const int expected = has_origin ? 0 : 1;
    double H = H0;
    Rectangle strip{re0, re1, p0.imag() - H, p0.imag() + H};
    int count = count_zeros(fc, strip, opt.contour_tol);
    for (int grow = 0; grow < 2 && count < expected; ++grow) {
      H *= 2.0;
      strip = {re0, re1, p0.imag() - H, p0.imag() + H};
      count = count_zeros(fc, strip, opt.contour_tol);
    }
    const int known = known_inside(roots, strip);
    if (known > count) throw NumericalFailure("strip count mismatch unresolved");
    if (known < count) fill_missing(f, strip, count, roots, opt, 0);
  }

  // rank order with the virtual zero of u2(1, .) at the origin for Dirichlet
  struct Item {
    cplx lambda;
    int multiplicity;
    bool is_virtual;
  };
  std::vector<Item> items;
  for (const auto& r : roots) {
    const double re = r.lambda.real();
    if (re < edge.front() || re >= edge.back()) continue;
    for (int j = 0; j < r.multiplicity; ++j) items.push_back({r.lambda, r.multiplicity, false});
  }
  if (dirichlet) items.push_back({0.0, 1, true});
  std::stable_sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
    const double ra = (a.lambda - p0).real(), rb = (b.lambda - p0).real();
    if (std::abs(ra - rb) > 1e-9 * (1.0 + std::abs(ra))) return ra < rb;
    return a.lambda.imag() < b.lambda.imag();
  });
  std::vector<long> offsets;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!items[i].is_virtual)
      offsets.push_back(std::lround(natural_label(items[i].lambda, p0, bc)) - static_cast<long>(i));
  if (offsets.empty()) throw NumericalFailure("strip count mismatch unresolved");
  std::nth_element(offsets.begin(), offsets.begin() + offsets.size() / 2, offsets.end());
  const long offset = offsets[offsets.size() / 2];

  long l0 = 0;
  const bool origin_in_window = !dirichlet || (edge.front() <= 0.0 && 0.0 < edge.back());
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].is_virtual) l0 = static_cast<long>(i) + offset;
  if (dirichlet && !origin_in_window) l0 = std::lround(natural_label(0.0, p0, bc));

  SpectrumReport rep;
  rep.shift = ctx.shift();
  rep.p0 = ctx.original.p0();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].is_virtual) continue;
    long n = static_cast<long>(i) + offset;
    if (dirichlet) {
      if (l0 > 0 && n >= 0 && n < l0) n += 1;
      if (l0 < 0 && n <= 0 && n > l0) n -= 1;
      if (!origin_in_window && n == 0) n = l0 > 0 ? 1 : -1;
    }
    if (n < n_min || n > n_max) continue;
    LabeledEigenvalue e;
    e.n = static_cast<int>(n);
    e.lambda = items[i].lambda - rep.shift;
    e.remainder = items[i].lambda - center(e.n);
    e.multiplicity = items[i].multiplicity;
    rep.eigenvalues.push_back(e);
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const LabeledEigenvalue& a, const LabeledEigenvalue& b) { return a.n < b.n; });
  for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i)
    if (rep.eigenvalues[i].n == rep.eigenvalues[i - 1].n) throw NumericalFailure("duplicate eigenvalue label");
  const long wanted = (n_max - n_min + 1) - (dirichlet && n_min <= 0 && n_max >= 0 ? 1 : 0);
  if (static_cast<long>(rep.eigenvalues.size()) != wanted) throw NumericalFailure("strip count mismatch unresolved");

  std::vector<int> ns;
  std::vector<double> vals;
  for (const auto& e : rep.eigenvalues) {
    ns.push_back(e.n);
    vals.push_back(std::norm(e.remainder));
  }
  rep.l2_windows = dyadic_windows(ns, vals);
  return rep;
}

SpectrumReport compute_spectrum(const Problem& problem, int n_min, int n_max, const SpectrumOptions& opt) {
  const auto ctx = make_context(problem, opt.tol);
  return compute_spectrum(*ctx, n_min, n_max, opt);
}

namespace {

// int_0^1 g(x) dx over the dense cells of a solution, three Gauss points per cell.
template <class G>
double integrate_cells(const std::vector<double>& nodes, const G& g) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], h = nodes[k + 1] - nodes[k];
    if (h < 1e-13) continue;
    for (int j = 0; j < 3; ++j) s += h * quad::kGauss3Weights[j] * g(a + h * quad::kGauss3Nodes[j]);
  }
  return s;
}

}  // namespace

void norming_constants(const SpectralContext& ctx, std::vector<LabeledEigenvalue>& eigen) {
  const DiracPotential& dp = ctx.dp_original;
  for (auto& e : eigen) {
    const FundamentalSolution fs = solve_U(dp, e.lambda, ctx.tol, false, true);
    const DiracCoeff coeff(dp, e.lambda);
    const double n2 = integrate_cells(fs.prop.nodes, [&](double x) {
      return dense_value(fs.prop, coeff, x).col(0).squaredNorm();
    });
    e.norming = std::sqrt(n2);
    e.outside_theorem = !ctx.original.is_real() || e.multiplicity > 1 ||
                        std::abs(e.lambda.imag()) > 1e-8 * (1.0 + std::abs(e.lambda));
  }
}

std::vector<double> eigenfunction_asymptotics(const SpectralContext& ctx, std::vector<LabeledEigenvalue>& eigen) {
  const DiracPotential& dp = ctx.dp_original;
  std::vector<double> out;
  for (auto& e : eigen) {
    const FundamentalSolution fs = solve_U(dp, e.lambda, ctx.tol, false, true);
    const DiracCoeff coeff(dp, e.lambda);
    const double n2 = integrate_cells(fs.prop.nodes, [&](double x) {
      const cplx u2 = dense_value(fs.prop, coeff, x)(1, 0);
      return std::norm(u2 - std::sin(e.lambda * x - dp.int_p(x)));
    });
    e.eigenfunction_residual = std::sqrt(n2);
    out.push_back(e.eigenfunction_residual);
  }
  return out;
}

}  // namespace edsl
