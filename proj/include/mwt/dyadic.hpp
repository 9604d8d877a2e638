#pragma once

// Dyadic lattice, cube windows, sampled fields, and the grid operators that
// act on them (conditional expectations and the maximal operator).
//
// Dyadic cubes are addressed relative to a base box B = lo + E [0,1)^n: the
// cube (j, k) is lo + E 2^{-j} [k, k+1). With B = [0,1)^n this is exactly the
// standard lattice Q_{j,k} = 2^{-j} prod [k_i, k_i + 1).

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mwt/linalg.hpp"

namespace mwt {

inline constexpr int kMaxSpaceDim = 3;
using Point = std::array<double, kMaxSpaceDim>;

double distance(const Point& a, const Point& b, int n);
double norm(const Point& a, int n);

/// Axis-aligned half-open box [lo, hi).
struct Box {
  int n = 1;
  Point lo{};
  Point hi{};

  static Box cube(int n, const Point& lo, double edge);
  static Box centered(int n, const Point& center, double edge);
  static Box unit(int n);

  Point center() const;
  double volume() const;
  double extent(int axis) const { return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]; }
  /// Edge length; only meaningful for cubes.
  double edge() const { return extent(0); }
  bool is_cube(double rel_tol = 1e-12) const;
  bool contains(const Point& x) const;
  /// Closed containment, used for singular-point adjacency tests.
  bool touches(const Point& x) const;
  bool inside(const Box& outer, double tol = 1e-12) const;
  /// Same center, every edge scaled by lambda.
  Box dilated(double lambda) const;
  Box intersect(const Box& other) const;
};

struct DyadicCube {
  int n = 1;
  int level = 0;
  std::array<std::int64_t, kMaxSpaceDim> index{};

  bool operator==(const DyadicCube&) const = default;
  auto operator<=>(const DyadicCube&) const = default;
};

/// Geometry of a dyadic cube inside a base box.
Box cube_box(const DyadicCube& q, const Box& base);
/// Lower-left corner x_Q.
Point cube_corner(const DyadicCube& q, const Box& base);
double side_length(const DyadicCube& q, const Box& base);

struct DilatedCube {
  Box box;
  bool clipped = false;
};

/// lambda Q: same center, edge lambda * l(Q). With `clip`, the result is
/// intersected with `base` and flagged; without it, leaving `base` throws
/// OutOfDomainError.
DilatedCube dilate(const DyadicCube& q, double lambda, const Box& base, bool clip);
/// 2^i Q.
DilatedCube dilate_pow2(const DyadicCube& q, int i, const Box& base, bool clip);
DyadicCube parent(const DyadicCube& q);
std::vector<DyadicCube> children(const DyadicCube& q);
bool contains(const DyadicCube& q, const Point& x, const Box& base);
/// The level-j cube containing x, if x lies in base.
std::optional<DyadicCube> locate(const Point& x, int level, const Box& base);

/// Finite slice {j_min <= j <= j_max} of the dyadic lattice over a base box.
struct CubeWindow {
  int n = 1;
  int j_min = 0;
  int j_max = 0;
  Box base = Box::unit(1);

  static CubeWindow make(int n, int j_min, int j_max, const Box& base);
  static CubeWindow unit(int n, int j_min, int j_max) { return make(n, j_min, j_max, Box::unit(n)); }

  std::int64_t cubes_per_axis(int level) const { return std::int64_t{1} << level; }
  std::size_t count(int level) const;
  std::size_t total() const;
  /// Cubes of one level in row-major index order (axis 0 slowest).
  std::vector<DyadicCube> level_cubes(int level) const;
  std::vector<DyadicCube> all_cubes() const;
  /// Row-major position of a level cube within level_cubes(level).
  std::size_t flat_index(const DyadicCube& q) const;
  bool covers(const DyadicCube& q) const;
};

/// Uniform grid with 2^bits cells per axis over a box. Node i stands for the
/// cell [lo + i h, lo + (i+1) h); fields sample at the lower-left corner and
/// weights at the cell midpoint.
struct Grid {
  int n = 1;
  int bits = 0;
  Box domain = Box::unit(1);

  std::size_t per_axis() const { return std::size_t{1} << bits; }
  std::size_t size() const;
  double spacing() const { return domain.edge() / static_cast<double>(per_axis()); }
  double cell_volume() const;
  std::array<std::size_t, kMaxSpaceDim> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<std::size_t, kMaxSpaceDim>& idx) const;
  Point corner(std::size_t flat) const;
  Point midpoint(std::size_t flat) const;
  bool operator==(const Grid&) const = default;
};

/// Real scalar field on a grid.
struct ScalarField {
  Grid grid;
  bool periodic = false;
  std::vector<double> values;

  static ScalarField zeros(const Grid& g, bool periodic = false);
};

/// Complex m-vector field on a grid (m = 1 allowed), node-major.
struct GridFunction {
  Grid grid;
  int m = 1;
  bool periodic = false;
  std::vector<cplx> values;

  static GridFunction zeros(const Grid& g, int m, bool periodic = false);
  std::span<cplx> at(std::size_t node) { return {values.data() + node * static_cast<std::size_t>(m), static_cast<std::size_t>(m)}; }
  std::span<const cplx> at(std::size_t node) const { return {values.data() + node * static_cast<std::size_t>(m), static_cast<std::size_t>(m)}; }
  /// Pointwise Euclidean norm |f(x)|.
  ScalarField magnitude() const;
};

/// One m x m matrix per level-j cube of a window, piecewise constant on the level.
struct MatrixField {
  int level = 0;
  CubeWindow window;
  std::vector<Matrix> matrices;  // in CubeWindow::level_cubes order

  const Matrix& at(const DyadicCube& q) const { return matrices[window.flat_index(q)]; }
};

/// E_j: replaces f on each level-j cube by its average. Throws ResolutionError
/// when level j is finer than the grid.
ScalarField expectation_field(const ScalarField& f, int level);
GridFunction expectation_field(const GridFunction& f, int level);

/// Centered dyadic-box maximal function of |f|: at every node, the largest
/// average over boxes of half-width 0, 1, 2, 4, ..., N/2 cells. Boxes wrap for
/// periodic fields and are clipped to the domain otherwise.
ScalarField hl_maximal(const ScalarField& f);
ScalarField hl_maximal(const GridFunction& f);

/// Sum over the cells of a level-j cube, for every cube of that level, in
/// row-major cube order. Used by expectation and norm code.
std::vector<double> block_sums(const ScalarField& f, int level);

class MatrixWeight;
class ReducingFamily;

/// gamma_j(x) = || W^{1/p}(x) A_Q^{-1} || for x in Q, Q of level j, sampled at
/// cell midpoints of `grid`. Throws CoverageError if the family lacks level j.
ScalarField gamma_field(const MatrixWeight& w, const ReducingFamily& family, double p, int level,
                        const Grid& grid);

}  // namespace mwt
