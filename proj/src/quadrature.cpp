#include "mwt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mwt/errors.hpp"

namespace mwt {

namespace {

std::size_t ax(int i) { return static_cast<std::size_t>(i); }

double distance_to_box(const Point& s, const Box& b) {
  double d2 = 0.0;
  for (int i = 0; i < b.n; ++i) {
    double d = 0.0;
    if (s[ax(i)] < b.lo[ax(i)]) d = b.lo[ax(i)] - s[ax(i)];
    else if (s[ax(i)] > b.hi[ax(i)]) d = s[ax(i)] - b.hi[ax(i)];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

double min_extent(const Box& b) {
  double e = b.extent(0);
  for (int i = 1; i < b.n; ++i) e = std::min(e, b.extent(i));
  return e;
}

struct Builder {
  const QuadratureSpec& spec;
  std::span<const Point> singular;
  std::vector<double> gl_x, gl_w;
  QuadratureRule& rule;
  int max_depth = 0;
  bool truncated = false;

  void emit(const Box& cell, int depth) {
    const int n = cell.n;
    const std::size_t q = gl_x.size();
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= q;
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale *= 0.5 * cell.extent(i);
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t rest = t;
      Point x{};
      double w = scale;
      for (int i = n - 1; i >= 0; --i) {
        const std::size_t k = rest % q;
        rest /= q;
        const double half = 0.5 * cell.extent(i);
        x[ax(i)] = cell.lo[ax(i)] + half * (gl_x[k] + 1.0);
        w *= gl_w[k];
      }
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
      rule.shell.push_back(depth);
    }
    rule.depth = std::max(rule.depth, depth);
  }

  void visit(const Box& cell, int depth) {
    bool near = false;
    bool inside = false;
    const double edge = min_extent(cell);
    for (const Point& s : singular) {
      const double d = distance_to_box(s, cell);
      if (d == 0.0) inside = true;
      if (d <= 0.5 * edge) near = true;
    }
    if (!near) {
      emit(cell, depth);
      return;
    }
    rule.graded = true;
    // Cut the cell through an interior singular point first, so that every
    // singularity sits at a cell corner and the shells decay geometrically.
    for (const Point& s : singular) {
      if (distance_to_box(s, cell) != 0.0) continue;
      std::array<bool, kMaxSpaceDim> cut{};
      bool any = false;
      for (int i = 0; i < cell.n; ++i) {
        cut[ax(i)] = s[ax(i)] > cell.lo[ax(i)] && s[ax(i)] < cell.hi[ax(i)];
        any = any || cut[ax(i)];
      }
      if (!any) continue;
      for (int c = 0; c < (1 << cell.n); ++c) {
        Box part = cell;
        bool empty = false;
        for (int i = 0; i < cell.n; ++i) {
          const bool upper = (c >> i) & 1;
          if (!cut[ax(i)]) {
            empty = empty || upper;
            continue;
          }
          if (upper) part.lo[ax(i)] = s[ax(i)];
          else part.hi[ax(i)] = s[ax(i)];
        }
        for (int i = 0; i < cell.n; ++i) empty = empty || !(part.hi[ax(i)] > part.lo[ax(i)]);
        if (!empty) visit(part, depth);
      }
      return;
    }
    if (depth >= max_depth) {
      // Cells whose closure holds a singular point are dropped; integrate()
      // restores their share from the geometric shell decay.
      if (inside) truncated = true;
      else emit(cell, depth);
      return;
    }
    const int n = cell.n;
    for (int c = 0; c < (1 << n); ++c) {
      Box child = cell;
      for (int i = 0; i < n; ++i) {
        const double mid = 0.5 * (cell.lo[ax(i)] + cell.hi[ax(i)]);
        if ((c >> i) & 1) child.lo[ax(i)] = mid;
        else child.hi[ax(i)] = mid;
      }
      visit(child, depth + 1);
    }
  }
};

}  // namespace

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1 || order > 64) throw InvalidArgumentError("Gauss-Legendre order must be in 1..64");
  nodes.assign(static_cast<std::size_t>(order), 0.0);
  weights.assign(static_cast<std::size_t>(order), 0.0);
  if (order == 1) {
    weights[0] = 2.0;
    return;
  }
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    weights[static_cast<std::size_t>(order - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule build_rule(const Box& region, std::span<const Point> singular, const QuadratureSpec& spec) {
  if (spec.order < 1 || spec.min_cells < 1 || spec.grading_depth < 3)
    throw InvalidArgumentError("quadrature spec needs order >= 1, min_cells >= 1, grading_depth >= 3");
  QuadratureRule rule;
  rule.n = region.n;
  rule.region = region;
  Builder b{spec, singular, {}, {}, rule};
  gauss_legendre(spec.order, b.gl_x, b.gl_w);
  const int n = region.n;
  // Stop grading well above the floating-point spacing of the coordinates, so
  // that cells cornered at a singular point never collapse to a few ulps.
  double magnitude = 0.0, h0 = region.extent(0);
  for (int i = 0; i < n; ++i) {
    magnitude = std::max({magnitude, std::abs(region.lo[ax(i)]), std::abs(region.hi[ax(i)])});
    for (const Point& s : singular) magnitude = std::max(magnitude, std::abs(s[ax(i)]));
    h0 = std::min(h0, region.extent(i));
  }
  h0 /= spec.min_cells;
  const double floor_width = 256.0 * std::numeric_limits<double>::epsilon() * std::max(magnitude, h0);
  b.max_depth = std::min(spec.grading_depth, static_cast<int>(std::floor(std::log2(h0 / floor_width))));
  if (b.max_depth < 3) throw InvalidArgumentError("quadrature region is too small for its coordinates");
  std::size_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= static_cast<std::size_t>(spec.min_cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    Box cell = region;
    for (int i = n - 1; i >= 0; --i) {
      const auto k = static_cast<double>(rest % static_cast<std::size_t>(spec.min_cells));
      rest /= static_cast<std::size_t>(spec.min_cells);
      const double h = region.extent(i) / spec.min_cells;
      cell.lo[ax(i)] = region.lo[ax(i)] + k * h;
      cell.hi[ax(i)] = region.lo[ax(i)] + (k + 1.0) * h;
    }
    b.visit(cell, 0);
  }
  rule.graded = b.truncated;
  return rule;
}

IntegralEstimate integrate(const QuadratureRule& rule, std::span<const double> values, double rel_tol,
                           double reference) {
  if (values.size() != rule.size()) throw InvalidArgumentError("value count does not match quadrature rule");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw IntegrabilityError("integrand is not finite at a quadrature node");
    total += rule.weights[i] * values[i];
  }
  IntegralEstimate est{total, 0.0, 0.0};
  if (!rule.graded) return est;

  const int D = rule.depth;
  std::vector<double> shells(static_cast<std::size_t>(D + 1), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i)
    shells[static_cast<std::size_t>(rule.shell[i])] += rule.weights[i] * values[i];
  const double s2 = shells[static_cast<std::size_t>(D)];
  const double s1 = shells[static_cast<std::size_t>(D - 1)];
  const double s0 = shells[static_cast<std::size_t>(D - 2)];
  const double scale = std::max(std::abs(total), std::abs(reference));
  const double r = s1 != 0.0 ? s2 / s1 : 0.0;
  est.tail_ratio = r;
  if (r >= 0.995)
    throw IntegrabilityError("integrand is not integrable near a singular point (shell ratio " +
                             std::to_string(r) + ")");
  const double r_prev = s0 != 0.0 ? s1 / s0 : 0.0;
  const bool geometric = r > 0.0 && std::abs(r - r_prev) <= 0.02 * std::max(r, 1e-3);
  if (geometric) {
    est.tail = s2 * r / (1.0 - r);
  } else if (std::abs(s2) + std::abs(s1) > rel_tol * scale) {
    // Shells neither decay geometrically nor are negligible: the singular
    // behaviour is not resolved at this depth.
    throw IntegrabilityError("quadrature tail near a singular point did not settle");
  }
  est.value = total + est.tail;
  return est;
}

double average(const QuadratureRule& rule, std::span<const double> values, double rel_tol) {
  return integrate(rule, values, rel_tol).value / rule.volume();
}

}  // namespace mwt
