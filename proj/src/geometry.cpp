#include <algorithm>
#include <cmath>
#include <string>

#include "mwt/dyadic.hpp"
#include "mwt/errors.hpp"

namespace mwt {

namespace {

std::size_t ax(int i) { return static_cast<std::size_t>(i); }

}  // namespace

double distance(const Point& a, const Point& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (a[ax(i)] - b[ax(i)]) * (a[ax(i)] - b[ax(i)]);
  return std::sqrt(s);
}

double norm(const Point& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[ax(i)] * a[ax(i)];
  return std::sqrt(s);
}

Box Box::cube(int n, const Point& lo, double edge) {
  if (n < 1 || n > kMaxSpaceDim) throw InvalidArgumentError("space dimension must be 1..3");
  if (!(edge > 0.0)) throw InvalidArgumentError("cube edge must be positive");
  Box b;
  b.n = n;
  for (int i = 0; i < n; ++i) {
    b.lo[ax(i)] = lo[ax(i)];
    b.hi[ax(i)] = lo[ax(i)] + edge;
  }
  return b;
}

Box Box::centered(int n, const Point& center, double edge) {
  Point lo{};
  for (int i = 0; i < n; ++i) lo[ax(i)] = center[ax(i)] - 0.5 * edge;
  return cube(n, lo, edge);
}

Box Box::unit(int n) { return cube(n, Point{}, 1.0); }

Point Box::center() const {
  Point c{};
  for (int i = 0; i < n; ++i) c[ax(i)] = 0.5 * (lo[ax(i)] + hi[ax(i)]);
  return c;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= extent(i);
  return v;
}

bool Box::is_cube(double rel_tol) const {
  for (int i = 1; i < n; ++i)
    if (std::abs(extent(i) - extent(0)) > rel_tol * extent(0)) return false;
  return true;
}

bool Box::contains(const Point& x) const {
  for (int i = 0; i < n; ++i)
    if (!(x[ax(i)] >= lo[ax(i)] && x[ax(i)] < hi[ax(i)])) return false;
  return true;
}

bool Box::touches(const Point& x) const {
  for (int i = 0; i < n; ++i)
    if (!(x[ax(i)] >= lo[ax(i)] && x[ax(i)] <= hi[ax(i)])) return false;
  return true;
}

bool Box::inside(const Box& outer, double tol) const {
  for (int i = 0; i < n; ++i) {
    const double slack = tol * outer.extent(i);
    if (lo[ax(i)] < outer.lo[ax(i)] - slack || hi[ax(i)] > outer.hi[ax(i)] + slack) return false;
  }
  return true;
}

Box Box::dilated(double lambda) const {
  if (!(lambda > 0.0)) throw InvalidArgumentError("dilation factor must be positive");
  Box b = *this;
  const Point c = center();
  for (int i = 0; i < n; ++i) {
    const double half = 0.5 * lambda * extent(i);
    b.lo[ax(i)] = c[ax(i)] - half;
    b.hi[ax(i)] = c[ax(i)] + half;
  }
  return b;
}

Box Box::intersect(const Box& other) const {
  Box b = *this;
  for (int i = 0; i < n; ++i) {
    b.lo[ax(i)] = std::max(lo[ax(i)], other.lo[ax(i)]);
    b.hi[ax(i)] = std::min(hi[ax(i)], other.hi[ax(i)]);
    if (!(b.hi[ax(i)] > b.lo[ax(i)])) throw OutOfDomainError("boxes do not overlap");
  }
  return b;
}

Point cube_corner(const DyadicCube& q, const Box& base) {
  const double side = side_length(q, base);
  Point x{};
  for (int i = 0; i < q.n; ++i) x[ax(i)] = base.lo[ax(i)] + side * static_cast<double>(q.index[ax(i)]);
  return x;
}

double side_length(const DyadicCube& q, const Box& base) { return std::ldexp(base.edge(), -q.level); }

Box cube_box(const DyadicCube& q, const Box& base) {
  return Box::cube(q.n, cube_corner(q, base), side_length(q, base));
}

DilatedCube dilate(const DyadicCube& q, double lambda, const Box& base, bool clip) {
  const Box d = cube_box(q, base).dilated(lambda);
  if (d.inside(base)) return {d, false};
  if (!clip)
    throw OutOfDomainError("dilated cube leaves the base domain (level " + std::to_string(q.level) +
                           ", factor " + std::to_string(lambda) + ")");
  return {d.intersect(base), true};
}

DilatedCube dilate_pow2(const DyadicCube& q, int i, const Box& base, bool clip) {
  return dilate(q, std::ldexp(1.0, i), base, clip);
}

DyadicCube parent(const DyadicCube& q) {
  if (q.level <= 0) throw OutOfDomainError("level-0 cube has no parent inside the base box");
  DyadicCube p = q;
  p.level = q.level - 1;
  for (int i = 0; i < q.n; ++i) p.index[ax(i)] = q.index[ax(i)] >> 1;
  return p;
}

std::vector<DyadicCube> children(const DyadicCube& q) {
  std::vector<DyadicCube> out;
  const int count = 1 << q.n;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    DyadicCube ch = q;
    ch.level = q.level + 1;
    for (int i = 0; i < q.n; ++i) {
      // Axis 0 is the slowest bit so children come out in row-major order.
      const int bit = (c >> (q.n - 1 - i)) & 1;
      ch.index[ax(i)] = 2 * q.index[ax(i)] + bit;
    }
    out.push_back(ch);
  }
  return out;
}

bool contains(const DyadicCube& q, const Point& x, const Box& base) {
  return cube_box(q, base).contains(x);
}

std::optional<DyadicCube> locate(const Point& x, int level, const Box& base) {
  if (!base.contains(x)) return std::nullopt;
  DyadicCube q;
  q.n = base.n;
  q.level = level;
  const double side = std::ldexp(base.edge(), -level);
  const std::int64_t last = (std::int64_t{1} << level) - 1;
  for (int i = 0; i < base.n; ++i) {
    auto k = static_cast<std::int64_t>(std::floor((x[ax(i)] - base.lo[ax(i)]) / side));
    q.index[ax(i)] = std::clamp<std::int64_t>(k, 0, last);
  }
  return q;
}

CubeWindow CubeWindow::make(int n, int j_min, int j_max, const Box& base) {
  if (n < 1 || n > kMaxSpaceDim) throw InvalidArgumentError("space dimension must be 1..3");
  if (j_min < 0 || j_max < j_min) throw InvalidArgumentError("window needs 0 <= j_min <= j_max");
  if (j_max * n > 40) throw InvalidArgumentError("window too fine to enumerate");
  if (base.n != n || !base.is_cube()) throw InvalidArgumentError("window base must be an n-cube");
  return CubeWindow{n, j_min, j_max, base};
}

std::size_t CubeWindow::count(int level) const {
  return std::size_t{1} << static_cast<std::size_t>(level * n);
}

std::size_t CubeWindow::total() const {
  std::size_t t = 0;
  for (int j = j_min; j <= j_max; ++j) t += count(j);
  return t;
}

std::vector<DyadicCube> CubeWindow::level_cubes(int level) const {
  std::vector<DyadicCube> out;
  const std::size_t c = count(level);
  out.reserve(c);
  const std::int64_t per = cubes_per_axis(level);
  for (std::size_t flat = 0; flat < c; ++flat) {
    DyadicCube q;
    q.n = n;
    q.level = level;
    std::size_t rest = flat;
    for (int i = n - 1; i >= 0; --i) {
      q.index[ax(i)] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(per));
      rest /= static_cast<std::size_t>(per);
    }
    out.push_back(q);
  }
  return out;
}

std::vector<DyadicCube> CubeWindow::all_cubes() const {
  std::vector<DyadicCube> out;
  out.reserve(total());
  for (int j = j_min; j <= j_max; ++j) {
    auto lvl = level_cubes(j);
    out.insert(out.end(), lvl.begin(), lvl.end());
  }
  return out;
}

std::size_t CubeWindow::flat_index(const DyadicCube& q) const {
  const auto per = static_cast<std::size_t>(cubes_per_axis(q.level));
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) flat = flat * per + static_cast<std::size_t>(q.index[ax(i)]);
  return flat;
}

bool CubeWindow::covers(const DyadicCube& q) const {
  if (q.n != n || q.level < j_min || q.level > j_max) return false;
  for (int i = 0; i < n; ++i)
    if (q.index[ax(i)] < 0 || q.index[ax(i)] >= cubes_per_axis(q.level)) return false;
  return true;
}

std::size_t Grid::size() const { return std::size_t{1} << static_cast<std::size_t>(bits * n); }

double Grid::cell_volume() const { return std::pow(spacing(), n); }

std::array<std::size_t, kMaxSpaceDim> Grid::unflatten(std::size_t flat) const {
  std::array<std::size_t, kMaxSpaceDim> idx{};
  const std::size_t per = per_axis();
  for (int i = n - 1; i >= 0; --i) {
    idx[ax(i)] = flat % per;
    flat /= per;
  }
  return idx;
}

std::size_t Grid::flatten(const std::array<std::size_t, kMaxSpaceDim>& idx) const {
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) flat = flat * per_axis() + idx[ax(i)];
  return flat;
}

Point Grid::corner(std::size_t flat) const {
  const auto idx = unflatten(flat);
  const double h = spacing();
  Point x{};
  for (int i = 0; i < n; ++i) x[ax(i)] = domain.lo[ax(i)] + h * static_cast<double>(idx[ax(i)]);
  return x;
}

Point Grid::midpoint(std::size_t flat) const {
  Point x = corner(flat);
  const double h = spacing();
  for (int i = 0; i < n; ++i) x[ax(i)] += 0.5 * h;
  return x;
}

}  // namespace mwt
