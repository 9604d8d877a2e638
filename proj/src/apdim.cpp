#include "mwt/apdim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mwt/errors.hpp"
#include "mwt/parallel.hpp"

namespace mwt {

namespace {

std::size_t ax(int i) { return static_cast<std::size_t>(i); }

double conjugate_exponent(double p) { return p / (p - 1.0); }

DyadicCube cube_from_flat(int n, int level, std::size_t flat) {
  DyadicCube q;
  q.n = n;
  q.level = level;
  const std::size_t per = std::size_t{1} << level;
  for (int i = n - 1; i >= 0; --i) {
    q.index[ax(i)] = static_cast<std::int64_t>(flat % per);
    flat /= per;
  }
  return q;
}

bool fits(const DyadicCube& q, int i_max, const Box& domain) {
  return !dilate_pow2(q, i_max, domain, true).clipped;
}

nlohmann::json cube_json(const DyadicCube& q) {
  nlohmann::json k = nlohmann::json::array();
  for (int i = 0; i < q.n; ++i) k.push_back(q.index[ax(i)]);
  return {{"level", q.level}, {"index", k}};
}

double log2_ratio_slope(const std::vector<double>& x, const std::vector<double>& y, double& residual) {
  const double nx = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= nx;
  my /= nx;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (my + slope * (x[k] - mx));
    ss += e * e;
  }
  residual = std::sqrt(ss / nx);
  return slope;
}

}  // namespace

ApDimensions ApDimensions::make(double d, double dtilde, double p) {
  ApDimensions out;
  out.d = d;
  out.dtilde = p > 1.0 ? dtilde : 0.0;
  out.delta = d / p + (p > 1.0 ? out.dtilde / conjugate_exponent(p) : 0.0);
  return out;
}

std::string to_string(ARoute r) {
  switch (r) {
    case ARoute::direct: return "direct";
    case ARoute::reducing: return "reducing";
    case ARoute::upper: return "upper";
    case ARoute::upper_reducing: return "upper_reducing";
  }
  return "unknown";
}

BaseFamily base_family(std::span<const Point> singular, const Box& domain, int j_min, int j_max, int i_max,
                       int stride) {
  if (i_max < 0) throw InvalidArgumentError("i_max must be nonnegative");
  if (j_min < 0 || j_max < j_min) throw InvalidArgumentError("base levels need 0 <= j_min <= j_max");
  const int n = domain.n;
  if (j_max * n > 60) throw InvalidArgumentError("base levels too fine for the index range");
  std::set<DyadicCube> picked;
  for (int j = j_min; j <= j_max; ++j) {
    const std::size_t count = std::size_t{1} << (j * n);
    const std::size_t step =
        stride > 0 ? static_cast<std::size_t>(stride) : std::max<std::size_t>(1, (count + 63) / 64);
    // Offset by half a step so subsampling does not always start at the corner.
    for (std::size_t flat = step / 2; flat < count; flat += step) {
      const DyadicCube q = cube_from_flat(n, j, flat);
      if (fits(q, i_max, domain)) picked.insert(q);
    }
    for (const Point& s : singular) {
      if (!domain.touches(s)) continue;
      const auto home = locate(s, j, domain);
      if (!home) continue;
      const std::int64_t per = std::int64_t{1} << j;
      for (int mask = 0; mask < (1 << n); ++mask) {
        DyadicCube q = *home;
        bool ok = true;
        for (int i = 0; i < n; ++i)
          if (mask & (1 << i)) {
            q.index[ax(i)] -= 1;
            ok = ok && q.index[ax(i)] >= 0 && q.index[ax(i)] < per;
          }
        if (ok && cube_box(q, domain).touches(s) && fits(q, i_max, domain)) picked.insert(q);
      }
    }
  }
  if (picked.empty()) throw InvalidArgumentError("no base cube admits the 2^{i_max} dilation inside the domain");
  return BaseFamily{domain, i_max, {picked.begin(), picked.end()}};
}

ASequence a_sequence(const MatrixWeight& w, double p, const BaseFamily& family, ARoute route,
                     const QuadratureSpec& quad, const ReduceOptions& reduce_opt) {
  if (!(p > 0.0)) throw InvalidArgumentError("a_i needs p > 0");
  const std::size_t levels = static_cast<std::size_t>(family.i_max + 1);
  const std::size_t nc = family.cubes.size();
  std::vector<double> table(nc * levels);
  ReduceOptions ropt = reduce_opt;
  ropt.quad = quad;
  parallel_for(nc, [&](std::size_t c) {
    const DyadicCube& q = family.cubes[c];
    const Box qb = cube_box(q, family.domain);
    std::optional<PositiveMatrix> aq;
    if (route == ARoute::reducing || route == ARoute::upper_reducing) aq = reduce(w, p, qb, ropt).a;
    for (std::size_t i = 0; i < levels; ++i) {
      const Box big = dilate_pow2(q, static_cast<int>(i), family.domain, false).box;
      double v = 0.0;
      switch (route) {
        case ARoute::direct: v = cross_average(w, p, qb, big, ApVariant::standard, quad); break;
        case ARoute::upper: v = cross_average(w, p, big, qb, ApVariant::standard, quad); break;
        case ARoute::reducing: {
          const PositiveMatrix ab = reduce(w, p, big, ropt).a;
          v = std::pow(op_norm(aq->matrix() * ab.inverse().matrix()), p);
          break;
        }
        case ARoute::upper_reducing: {
          const PositiveMatrix ab = reduce(w, p, big, ropt).a;
          v = std::pow(op_norm(ab.matrix() * aq->inverse().matrix()), p);
          break;
        }
      }
      table[c * levels + i] = v;
    }
  });
  ASequence out;
  out.route = route;
  out.cubes = nc;
  out.a.assign(levels, -std::numeric_limits<double>::infinity());
  out.argmax.resize(levels);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < levels; ++i)
      if (table[c * levels + i] > out.a[i]) {
        out.a[i] = table[c * levels + i];
        out.argmax[i] = family.cubes[c];
      }
  for (double v : out.a)
    if (!std::isfinite(v) || !(v > 0.0)) throw IntegrabilityError("a_i is not a finite positive number");
  return out;
}

DimensionEstimate fit_tail(const ASequence& seq) {
  DimensionEstimate e;
  e.seq = seq;
  const int i_max = static_cast<int>(seq.a.size()) - 1;
  e.i_lo = (i_max + 1) / 2;
  e.i_hi = i_max;
  if (e.i_hi <= e.i_lo) {
    e.i_lo = 0;
    if (e.i_hi == 0) return e;
  }
  std::vector<double> x, y;
  for (int i = e.i_lo; i <= e.i_hi; ++i) {
    x.push_back(i);
    y.push_back(std::log2(seq.a[ax(i)]));
  }
  e.slope = log2_ratio_slope(x, y, e.residual);
  return e;
}

DimensionReport estimate_dimensions(const MatrixWeight& w, double p, const ApdimConfig& cfg) {
  if (!(p > 0.0)) throw InvalidArgumentError("A_p-dimensions need p > 0");
  const int n = w.space_dim();
  const Box domain = cfg.domain.value_or(w.domain());
  const int j_min = cfg.j_min >= 0 ? cfg.j_min : cfg.i_max + 1;
  const int j_max = cfg.j_max >= 0 ? cfg.j_max : j_min + 5;
  const BaseFamily fam = base_family(w.singular_points(), domain, j_min, j_max, cfg.i_max, cfg.stride);
  const bool reducing_route = cfg.route ? (*cfg.route == ARoute::reducing) : !w.is_scalar();

  DimensionReport r;
  r.p = p;
  r.primal = fit_tail(a_sequence(w, p, fam, reducing_route ? ARoute::reducing : ARoute::direct, cfg.quad, cfg.reduce));
  double dtilde = 0.0;
  if (p > 1.0) {
    const double pp = conjugate_exponent(p);
    r.dual = fit_tail(a_sequence(dual_weight(w, p), pp, fam, reducing_route ? ARoute::reducing : ARoute::direct,
                                 cfg.quad, cfg.reduce));
    r.upper = fit_tail(
        a_sequence(w, p, fam, reducing_route ? ARoute::upper_reducing : ARoute::upper, cfg.quad, cfg.reduce));
    dtilde = r.dual->slope;
  }
  r.raw = ApDimensions::make(r.primal.slope, dtilde, p);
  const double top = std::nextafter(static_cast<double>(n), 0.0);
  auto clamp = [&](double v, const char* name) {
    if (v < -0.05 || v > n + 0.05)
      r.flags.push_back(std::string(name) + " estimate " + std::to_string(v) + " lies outside [0, n)");
    return std::clamp(v, 0.0, top);
  };
  r.dims = ApDimensions::make(clamp(r.raw.d, "d"), p > 1.0 ? clamp(dtilde, "dtilde") : 0.0, p);
  return r;
}

EnvelopeResult growth_envelope_check(const ReducingFamily& family, const ApDimensions& dims) {
  const CubeWindow& win = family.window();
  const double p = family.order();
  const double e1 = dims.d / p;
  const double e2 = p > 1.0 ? dims.dtilde / conjugate_exponent(p) : 0.0;
  const std::vector<DyadicCube> cubes = win.all_cubes();
  const std::size_t nc = cubes.size();
  std::vector<double> side(nc);
  std::vector<Point> corner(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    side[k] = side_length(cubes[k], win.base);
    corner[k] = cube_corner(cubes[k], win.base);
  }
  std::vector<double> best(nc, 0.0);
  std::vector<std::size_t> best_r(nc, 0);
  parallel_for(nc, [&](std::size_t a) {
    const Matrix& aq = family.at(cubes[a]).matrix();
    for (std::size_t b = 0; b < nc; ++b) {
      const double lq = side[a], lr = side[b];
      const double scale = std::max(std::pow(lr / lq, e1), std::pow(lq / lr, e2));
      const double spread = std::pow(1.0 + distance(corner[a], corner[b], win.n) / std::max(lq, lr), dims.delta);
      const double ratio = op_norm(aq * family.inverse_at(cubes[b])) / (scale * spread);
      if (ratio > best[a]) {
        best[a] = ratio;
        best_r[a] = b;
      }
    }
  });
  EnvelopeResult out;
  out.pairs = nc * nc;
  for (std::size_t a = 0; a < nc; ++a)
    if (best[a] > out.max_ratio) {
      out.max_ratio = best[a];
      out.witness_q = cubes[a];
      out.witness_r = cubes[best_r[a]];
    }
  return out;
}

DoublingResult doubling_exponent(const MatrixWeight& w, double p, const CubeWindow& window, int directions,
                                 const QuadratureSpec& quad) {
  const int m = w.matrix_dim();
  const std::vector<Vector> dirs = sphere_directions(m, m == 1 ? 1 : std::max(1, directions));
  std::vector<DyadicCube> cubes;
  for (const DyadicCube& q : window.all_cubes())
    if (!dilate(q, 2.0, window.base, true).clipped) cubes.push_back(q);
  if (cubes.empty()) throw InvalidArgumentError("no window cube has its double inside the base");
  std::vector<double> best(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t c) {
    const Box qb = cube_box(cubes[c], window.base);
    const CubeNorm small(w, p, qb, quad);
    const CubeNorm big(w, p, dilate(cubes[c], 2.0, window.base, false).box, quad);
    double mx = 0.0;
    for (const Vector& z : dirs) mx = std::max(mx, std::pow(big(z) / small(z), p));
    best[c] = std::log2(std::ldexp(mx, w.space_dim()));
  });
  DoublingResult out;
  out.cubes = cubes.size();
  out.beta = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cubes.size(); ++c)
    if (best[c] > out.beta) {
      out.beta = best[c];
      out.witness = cubes[c];
    }
  return out;
}

ReverseHolderResult reverse_holder_probe(const MatrixWeight& w, double p, const CubeWindow& window,
                                         const std::vector<double>& r_grid, double bound,
                                         const QuadratureSpec& quad) {
  const int m = w.matrix_dim();
  std::vector<Matrix> tests{Matrix::Identity(m, m)};
  if (m > 1)
    for (int i = 0; i < m; ++i) {
      Matrix e = Matrix::Zero(m, m);
      e(i, i) = 1.0;
      tests.push_back(e);
    }
  const std::vector<DyadicCube> cubes = window.all_cubes();
  const std::size_t nr = r_grid.size();
  std::vector<double> ratio(cubes.size() * nr, 0.0);
  std::vector<char> bad(cubes.size() * nr, 0);
  parallel_for(cubes.size(), [&](std::size_t c) {
    const QuadratureRule rule = build_rule(cube_box(cubes[c], window.base), w.singular_points(), quad);
    std::vector<double> g(rule.size()), v(rule.size());
    for (const Matrix& t : tests) {
      for (std::size_t k = 0; k < g.size(); ++k) g[k] = std::pow(op_norm(w.power(rule.nodes[k], 1.0 / p) * t), p);
      const double base_avg = average(rule, g, quad.rel_tol);
      for (std::size_t ri = 0; ri < nr; ++ri) {
        try {
          for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(g[k], r_grid[ri]);
          const double top = std::pow(average(rule, v, quad.rel_tol), 1.0 / r_grid[ri]);
          ratio[c * nr + ri] = std::max(ratio[c * nr + ri], top / base_avg);
        } catch (const IntegrabilityError&) {
          bad[c * nr + ri] = 1;
        }
      }
    }
  });
  ReverseHolderResult out;
  for (std::size_t ri = 0; ri < nr; ++ri) {
    ReverseHolderRow row;
    row.r = r_grid[ri];
    for (std::size_t c = 0; c < cubes.size(); ++c) {
      row.divergent = row.divergent || bad[c * nr + ri];
      row.ratio = std::max(row.ratio, ratio[c * nr + ri]);
    }
    if (row.divergent) row.ratio = std::numeric_limits<double>::infinity();
    if (!row.divergent && row.ratio <= bound) out.r_hat = std::max(out.r_hat, row.r);
    out.rows.push_back(row);
  }
  return out;
}

int admissible_M(double s, double tau, double p, const ApDimensions& dims, int n, MVariant variant) {
  if (!(p > 0.0)) throw InvalidArgumentError("admissible M needs p > 0");
  const double dual_term = p > 1.0 ? dims.dtilde / conjugate_exponent(p) : 0.0;
  double bound;
  if (variant == MVariant::embedding) {
    const double snt = s + n * tau;
    bound = std::max({n / p + dual_term - snt, snt - (n - dims.d) / p, dims.delta});
  } else {
    bound = std::max({dims.d / p + s, dual_term - s, dims.delta});
  }
  return static_cast<int>(std::floor(bound)) + 1;
}

nlohmann::json to_json(const ASequence& seq) {
  nlohmann::json argmax = nlohmann::json::array();
  for (const auto& q : seq.argmax) argmax.push_back(cube_json(q));
  nlohmann::json log2a = nlohmann::json::array();
  for (double v : seq.a) log2a.push_back(std::log2(v));
  return {{"route", to_string(seq.route)}, {"a", seq.a}, {"log2_a", log2a}, {"argmax", argmax}, {"base_cubes", seq.cubes}};
}

nlohmann::json to_json(const DimensionReport& r) {
  auto est = [](const DimensionEstimate& e) {
    return nlohmann::json{{"sequence", to_json(e.seq)},
                          {"slope", e.slope},
                          {"fit_window", {e.i_lo, e.i_hi}},
                          {"residual", e.residual}};
  };
  nlohmann::json j{{"p", r.p},
                   {"d", r.dims.d},
                   {"dtilde", r.dims.dtilde},
                   {"delta", r.dims.delta},
                   {"raw", {{"d", r.raw.d}, {"dtilde", r.raw.dtilde}, {"delta", r.raw.delta}}},
                   {"primal", est(r.primal)},
                   {"flags", r.flags}};
  if (r.dual) j["dual"] = est(*r.dual);
  if (r.upper) j["upper"] = est(*r.upper);
  return j;
}

}  // namespace mwt
