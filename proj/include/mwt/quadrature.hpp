#pragma once

// Tensor-product Gauss-Legendre quadrature on boxes, geometrically graded
// toward a finite set of singular points.
//
// A cell whose closure touches a singular point is split into 2^n children,
// down to `grading_depth` levels; every other cell gets a tensor Gauss rule.
// Each node remembers the depth ("shell") of the cell it came from. For an
// integrand behaving like |x - s|^a near s, shell contributions decay
// geometrically with ratio 2^{-(a+n)}; integrate() uses the last shells to
// add the geometric tail and to detect non-integrable singularities.

#include <span>
#include <vector>

#include "mwt/dyadic.hpp"

namespace mwt {

struct QuadratureSpec {
  int order = 6;           // Gauss-Legendre nodes per axis and cell
  int min_cells = 2;       // initial cells per axis
  int grading_depth = 48;  // refinement levels toward singular points
  double rel_tol = 1e-4;   // accepted size of an unresolved tail, relative to the integral

  bool operator==(const QuadratureSpec&) const = default;
};

struct QuadratureRule {
  int n = 1;
  Box region;
  std::vector<Point> nodes;
  std::vector<double> weights;  // sum to region.volume()
  std::vector<int> shell;       // 0 for cells never refined
  int depth = 0;                // deepest shell present
  bool graded = false;

  std::size_t size() const { return nodes.size(); }
  double volume() const { return region.volume(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

QuadratureRule build_rule(const Box& region, std::span<const Point> singular, const QuadratureSpec& spec);

struct IntegralEstimate {
  double value = 0.0;
  double tail = 0.0;        // geometric tail added to the node sum
  double tail_ratio = 0.0;  // estimated shell decay ratio (0 when not graded)
};

/// Integral of sampled values over the rule's region. Throws
/// IntegrabilityError when the shell sums do not decay, or when the
/// last shells neither decay geometrically nor fall below rel_tol of the
/// integral. `reference` widens that scale for integrands that may cancel
/// (for instance off-diagonal matrix entries measured against the trace).
IntegralEstimate integrate(const QuadratureRule& rule, std::span<const double> values, double rel_tol,
                           double reference = 0.0);
/// Mean value over the region (integral / volume).
double average(const QuadratureRule& rule, std::span<const double> values, double rel_tol);

}  // namespace mwt
