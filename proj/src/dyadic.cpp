#include <algorithm>
#include <cmath>
#include <string>

#include "mwt/dyadic.hpp"
#include "mwt/errors.hpp"
#include "mwt/simd.hpp"

namespace mwt {

namespace {

std::size_t ax(int i) { return static_cast<std::size_t>(i); }

void check_level(const Grid& g, int level) {
  if (level < 0 || level > g.bits)
    throw ResolutionError("level " + std::to_string(level) + " is not resolvable on a grid with " +
                          std::to_string(g.bits) + " bits per axis");
}

// Flat index of the level-j cube containing each node.
std::vector<std::size_t> cube_of_node(const Grid& g, int level) {
  std::vector<std::size_t> out(g.size());
  const int shift = g.bits - level;
  const std::size_t per = std::size_t{1} << level;
  for (std::size_t node = 0; node < g.size(); ++node) {
    const auto idx = g.unflatten(node);
    std::size_t flat = 0;
    for (int i = 0; i < g.n; ++i) flat = flat * per + (idx[ax(i)] >> shift);
    out[node] = flat;
  }
  return out;
}

// Box sums of half-width r along one axis; `counts` tracks how many cells
// each clipped box really covers.
void box_sum_axis(std::vector<double>& data, std::vector<double>& counts, const Grid& g, int axis,
                  std::size_t r, bool periodic) {
  const std::size_t per = g.per_axis();
  std::size_t stride = 1;
  for (int i = g.n - 1; i > axis; --i) stride *= per;
  const std::size_t outer = g.size() / (per * stride);
  std::vector<double> line(per), prefix(per + 1);
  std::vector<double> out(data.size());
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t s = 0; s < stride; ++s) {
      const std::size_t base = o * per * stride + s;
      prefix[0] = 0.0;
      for (std::size_t t = 0; t < per; ++t) prefix[t + 1] = prefix[t] + data[base + t * stride];
      for (std::size_t t = 0; t < per; ++t) {
        double v;
        if (periodic) {
          const auto lo = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(r);
          const auto hi = static_cast<std::int64_t>(t + r) + 1;
          const auto P = static_cast<std::int64_t>(per);
          auto wrapped = [&](std::int64_t e) {
            // prefix sum extended periodically: S(e) = floor(e/P) * total + prefix[e mod P]
            const std::int64_t q = (e >= 0) ? e / P : -((-e + P - 1) / P);
            const std::int64_t rem = e - q * P;
            return static_cast<double>(q) * prefix[per] + prefix[static_cast<std::size_t>(rem)];
          };
          v = wrapped(hi) - wrapped(lo);
        } else {
          const std::size_t lo = t >= r ? t - r : 0;
          const std::size_t hi = std::min(per, t + r + 1);
          v = prefix[hi] - prefix[lo];
          counts[base + t * stride] *= static_cast<double>(hi - lo);
        }
        out[base + t * stride] = v;
      }
      if (periodic)
        for (std::size_t t = 0; t < per; ++t) counts[base + t * stride] *= static_cast<double>(2 * r + 1);
    }
  data.swap(out);
}

}  // namespace

ScalarField ScalarField::zeros(const Grid& g, bool periodic) {
  return ScalarField{g, periodic, std::vector<double>(g.size(), 0.0)};
}

GridFunction GridFunction::zeros(const Grid& g, int m, bool periodic) {
  if (m < 1 || m > kMaxMatrixDim) throw InvalidArgumentError("vector dimension must be 1..4");
  return GridFunction{g, m, periodic, std::vector<cplx>(g.size() * static_cast<std::size_t>(m))};
}

ScalarField GridFunction::magnitude() const {
  ScalarField out = ScalarField::zeros(grid, periodic);
  if (m == 1) {
    simd::complex_abs(out.values, values);
    return out;
  }
  for (std::size_t node = 0; node < grid.size(); ++node) {
    double s = 0.0;
    for (const cplx& c : at(node)) s += std::norm(c);
    out.values[node] = std::sqrt(s);
  }
  return out;
}

std::vector<double> block_sums(const ScalarField& f, int level) {
  check_level(f.grid, level);
  const auto owner = cube_of_node(f.grid, level);
  std::vector<double> sums(std::size_t{1} << static_cast<std::size_t>(level * f.grid.n), 0.0);
  for (std::size_t node = 0; node < owner.size(); ++node) sums[owner[node]] += f.values[node];
  return sums;
}

ScalarField expectation_field(const ScalarField& f, int level) {
  check_level(f.grid, level);
  const auto owner = cube_of_node(f.grid, level);
  const auto sums = block_sums(f, level);
  const double cells = std::ldexp(1.0, (f.grid.bits - level) * f.grid.n);
  ScalarField out = ScalarField::zeros(f.grid, f.periodic);
  for (std::size_t node = 0; node < owner.size(); ++node) out.values[node] = sums[owner[node]] / cells;
  return out;
}

GridFunction expectation_field(const GridFunction& f, int level) {
  check_level(f.grid, level);
  const auto owner = cube_of_node(f.grid, level);
  const std::size_t m = static_cast<std::size_t>(f.m);
  std::vector<cplx> sums((std::size_t{1} << static_cast<std::size_t>(level * f.grid.n)) * m);
  for (std::size_t node = 0; node < owner.size(); ++node)
    for (std::size_t c = 0; c < m; ++c) sums[owner[node] * m + c] += f.values[node * m + c];
  const double cells = std::ldexp(1.0, (f.grid.bits - level) * f.grid.n);
  GridFunction out = GridFunction::zeros(f.grid, f.m, f.periodic);
  for (std::size_t node = 0; node < owner.size(); ++node)
    for (std::size_t c = 0; c < m; ++c) out.values[node * m + c] = sums[owner[node] * m + c] / cells;
  return out;
}

ScalarField hl_maximal(const ScalarField& f) {
  const Grid& g = f.grid;
  const std::size_t per = g.per_axis();
  std::vector<double> absf(f.values.size());
  for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::fabs(f.values[i]);

  ScalarField out = ScalarField::zeros(g, f.periodic);
  out.values = absf;  // half-width 0

  const std::size_t r_cap = f.periodic ? (per - 1) / 2 : per / 2;
  std::vector<std::size_t> radii;
  for (std::size_t r = 1; r <= r_cap; r *= 2) radii.push_back(r);

  // The last axis uses prefix differences with a uniform scale on the interior,
  // which is where the vector kernel runs; box sums on the other axes are
  // computed separably first.
  std::vector<double> prefix(per + 1), upper(per), lower(per);
  for (std::size_t r : radii) {
    std::vector<double> partial = absf;
    std::vector<double> counts(absf.size(), 1.0);
    for (int axis = 0; axis + 1 < g.n; ++axis) box_sum_axis(partial, counts, g, axis, r, f.periodic);

    const std::size_t rows = g.size() / per;
    for (std::size_t row = 0; row < rows; ++row) {
      const std::size_t base = row * per;
      const double row_count = counts[base];
      prefix[0] = 0.0;
      for (std::size_t t = 0; t < per; ++t) prefix[t + 1] = prefix[t] + partial[base + t];
      double* dst = out.values.data() + base;
      if (f.periodic) {
        const double total = prefix[per];
        for (std::size_t t = 0; t < per; ++t) {
          const auto lo = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(r);
          const std::size_t hi = t + r + 1;
          upper[t] = hi <= per ? prefix[hi] : total + prefix[hi - per];
          lower[t] = lo >= 0 ? prefix[static_cast<std::size_t>(lo)]
                             : prefix[static_cast<std::size_t>(lo + static_cast<std::int64_t>(per))] - total;
        }
        simd::box_max_update({dst, per}, upper, lower, 1.0 / (row_count * static_cast<double>(2 * r + 1)));
      } else {
        // Clipped boxes near the ends; uniform interior [r, per - r - 1].
        for (std::size_t t = 0; t < per; ++t) {
          const std::size_t lo = t >= r ? t - r : 0;
          const std::size_t hi = std::min(per, t + r + 1);
          upper[t] = prefix[hi];
          lower[t] = prefix[lo];
        }
        const std::size_t a = std::min(r, per);
        const std::size_t b = per > r ? per - r : 0;  // exclusive end of the interior
        if (b > a)
          simd::box_max_update({dst + a, b - a}, {upper.data() + a, b - a}, {lower.data() + a, b - a},
                               1.0 / (row_count * static_cast<double>(2 * r + 1)));
        for (std::size_t t = 0; t < per; ++t) {
          if (t >= a && t < b) continue;
          const std::size_t lo = t >= r ? t - r : 0;
          const std::size_t hi = std::min(per, t + r + 1);
          const double v = (upper[t] - lower[t]) / (row_count * static_cast<double>(hi - lo));
          dst[t] = dst[t] < v ? v : dst[t];
        }
      }
    }
  }
  return out;
}

ScalarField hl_maximal(const GridFunction& f) {
  ScalarField mag = f.magnitude();
  return hl_maximal(mag);
}

}  // namespace mwt
