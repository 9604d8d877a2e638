#include "mwt/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mwt/errors.hpp"
#include "mwt/parallel.hpp"
#include "mwt/simd.hpp"

namespace mwt {

namespace {

std::size_t ax(int i) { return static_cast<std::size_t>(i); }

std::size_t cells(int n, int res) { return std::size_t{1} << static_cast<std::size_t>(res * n); }

// One level coarser: sums (or maxima) over the 2^n children of every cell.
std::vector<double> coarsen_once(const std::vector<double>& fine, int n, int res, bool use_max) {
  const std::size_t per = std::size_t{1} << res;
  const std::size_t half = per / 2;
  std::vector<double> out(cells(n, res - 1), 0.0);
  std::array<std::size_t, kMaxSpaceDim> idx{};
  for (std::size_t flat = 0; flat < fine.size(); ++flat) {
    std::size_t rest = flat;
    for (int i = n - 1; i >= 0; --i) {
      idx[ax(i)] = rest % per;
      rest /= per;
    }
    std::size_t parent = 0;
    for (int i = 0; i < n; ++i) parent = parent * half + (idx[ax(i)] >> 1);
    if (use_max)
      out[parent] = std::max(out[parent], fine[flat]);
    else
      out[parent] += fine[flat];
  }
  return out;
}

// For every cell at resolution `fine_res`, the flat index of its ancestor at `coarse_res`.
std::vector<std::size_t> ancestor_map(int n, int fine_res, int coarse_res) {
  const std::size_t per = std::size_t{1} << fine_res;
  const std::size_t cper = std::size_t{1} << coarse_res;
  const int shift = fine_res - coarse_res;
  std::vector<std::size_t> out(cells(n, fine_res));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rest = flat, parent = 0, mult = 1;
    for (int i = n - 1; i >= 0; --i) {
      parent += ((rest % per) >> shift) * mult;
      mult *= cper;
      rest /= per;
    }
    out[flat] = parent;
  }
  return out;
}

DyadicCube cube_at(int n, int level, std::size_t flat) {
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

double global_max(const LevelFamily& f, int from_level) {
  double m = 0.0;
  for (const auto& l : f.levels)
    if (l.level >= from_level) m = std::max(m, simd::max_abs(l.values));
  return m;
}

void check_family(const LevelFamily& f, const CubeWindow& win) {
  if (f.n != win.n) throw InvalidArgumentError("level family and window differ in dimension");
  for (int i = 0; i < f.n; ++i)
    if (std::abs(f.base.lo[ax(i)] - win.base.lo[ax(i)]) > 1e-12 * win.base.edge() ||
        std::abs(f.base.hi[ax(i)] - win.base.hi[ax(i)]) > 1e-12 * win.base.edge())
      throw InvalidArgumentError("level family and window use different base boxes");
  for (const auto& l : f.levels) {
    if (l.res < l.level) throw InvalidArgumentError("a level field is coarser than its level");
    if (l.values.size() != cells(f.n, l.res)) throw InvalidArgumentError("level field has the wrong size");
  }
}

// Picks the best P over per-level tables of un-normalized norms.
NormResult pick(const std::vector<std::vector<double>>& per_level, const CubeWindow& win, double tau, double scale) {
  NormResult out;
  out.argmax = cube_at(win.n, win.j_min, 0);
  const double e = win.base.edge();
  for (int l = win.j_min; l <= win.j_max; ++l) {
    const double vol = std::pow(std::ldexp(e, -l), win.n);
    const double factor = tau == 0.0 ? 1.0 : std::pow(vol, -tau);
    const auto& row = per_level[static_cast<std::size_t>(l - win.j_min)];
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double v = factor * row[k];
      if (v > out.value) {
        out.value = v;
        out.argmax = cube_at(win.n, l, k);
      }
    }
  }
  out.value *= scale;
  return out;
}

std::string cube_key(const DyadicCube& q) {
  std::ostringstream os;
  os << '(' << q.level;
  for (int i = 0; i < q.n; ++i) os << ',' << q.index[ax(i)];
  os << ')';
  return os.str();
}

DyadicCube parse_key(const std::string& key, int n) {
  if (key.size() < 3 || key.front() != '(' || key.back() != ')') throw FormatError("coefficients: bad key " + key);
  std::vector<std::int64_t> parts;
  std::stringstream ss(key.substr(1, key.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoll(item, &used));
      if (used != item.size()) throw FormatError("coefficients: bad key " + key);
    } catch (const std::logic_error&) {
      throw FormatError("coefficients: bad key " + key);
    }
  }
  if (static_cast<int>(parts.size()) != n + 1) throw FormatError("coefficients: key " + key + " has wrong arity");
  DyadicCube q;
  q.n = n;
  q.level = static_cast<int>(parts[0]);
  for (int i = 0; i < n; ++i) q.index[ax(i)] = parts[ax(i + 1)];
  return q;
}

}  // namespace

void SpaceParams::validate() const {
  if (!(tau >= 0.0)) throw InvalidArgumentError("tau must be nonnegative");
  if (!(p > 0.0)) throw InvalidArgumentError("p must lie in (0, inf]");
  if (!(q > 0.0)) throw InvalidArgumentError("q must lie in (0, inf]");
  if (!std::isfinite(s)) throw InvalidArgumentError("s must be finite");
}

std::string to_string(SpaceKind k) { return k == SpaceKind::B ? "B" : "F"; }

std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
  }
  return "unknown";
}

Criticality classify(const SpaceParams& params) {
  params.validate();
  const double inv_p = std::isinf(params.p) ? 0.0 : 1.0 / params.p;
  if (params.tau > inv_p || (params.tau == inv_p && std::isinf(params.q))) return Criticality::supercritical;
  if (params.tau == inv_p && params.kind == SpaceKind::F) return Criticality::critical;
  return Criticality::subcritical;
}

CoefficientField CoefficientField::zeros(const CubeWindow& window, int m) {
  if (m < 1 || m > kMaxMatrixDim) throw InvalidArgumentError("coefficient vectors need 1 <= m <= 4");
  return CoefficientField{window, m, std::vector<cplx>(window.total() * static_cast<std::size_t>(m))};
}

std::size_t CoefficientField::offset(const DyadicCube& q) const {
  if (!window.covers(q)) throw CoverageError("cube outside the coefficient window");
  std::size_t off = 0;
  for (int j = window.j_min; j < q.level; ++j) off += window.count(j);
  return (off + window.flat_index(q)) * static_cast<std::size_t>(m);
}

nlohmann::json to_json(const CoefficientField& t) {
  nlohmann::json lo = nlohmann::json::array();
  for (int i = 0; i < t.window.n; ++i) lo.push_back(t.window.base.lo[ax(i)]);
  nlohmann::json vals = nlohmann::json::object();
  for (const DyadicCube& q : t.window.all_cubes()) {
    nlohmann::json v = nlohmann::json::array();
    for (const cplx& c : t.at(q)) v.push_back({c.real(), c.imag()});
    vals[cube_key(q)] = v;
  }
  return {{"format", "mwt-coefficients"},
          {"version", 1},
          {"n", t.window.n},
          {"m", t.m},
          {"window", {{"j_min", t.window.j_min}, {"j_max", t.window.j_max}, {"base", {{"lo", lo}, {"edge", t.window.base.edge()}}}}},
          {"values", vals}};
}

CoefficientField coefficient_field_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "mwt-coefficients") throw FormatError("coefficients: not an mwt-coefficients document");
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    if (n < 1 || n > kMaxSpaceDim) throw FormatError("coefficients: n must be 1..3");
    const auto& w = j.at("window");
    Point lo{};
    const auto& jlo = w.at("base").at("lo");
    if (static_cast<int>(jlo.size()) != n) throw FormatError("coefficients: base.lo has wrong length");
    for (int i = 0; i < n; ++i) lo[ax(i)] = jlo[ax(i)].get<double>();
    const CubeWindow win = CubeWindow::make(n, w.at("j_min").get<int>(), w.at("j_max").get<int>(),
                                            Box::cube(n, lo, w.at("base").at("edge").get<double>()));
    CoefficientField t = CoefficientField::zeros(win, m);
    for (const auto& [key, v] : j.at("values").items()) {
      const DyadicCube q = parse_key(key, n);
      if (!win.covers(q)) throw FormatError("coefficients: key " + key + " lies outside the window");
      if (!v.is_array() || static_cast<int>(v.size()) != m) throw FormatError("coefficients: value of " + key + " has wrong length");
      auto dst = t.at(q);
      for (int c = 0; c < m; ++c) dst[ax(c)] = cplx(v[ax(c)].at(0).get<double>(), v[ax(c)].at(1).get<double>());
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("coefficients: ") + e.what());
  }
}

void save(const CoefficientField& t, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os << to_json(t).dump(1) << '\n';
}

CoefficientField load_coefficient_field(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  try {
    return coefficient_field_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("coefficients: ") + e.what());
  }
}

NormResult la_tau_norm(const LevelFamily& f, const SpaceParams& params, const CubeWindow& win) {
  params.validate();
  check_family(f, win);
  const bool p_inf = std::isinf(params.p);
  const bool q_inf = std::isinf(params.q);
  if (p_inf && params.kind == SpaceKind::F)
    throw InvalidArgumentError("the p = infinity Triebel-Lizorkin scale has its own norm (finfty_norm)");
  const int n = f.n;
  const double edge = f.base.edge();
  const double scale = global_max(f, win.j_min);
  std::vector<std::vector<double>> acc;
  for (int l = win.j_min; l <= win.j_max; ++l) acc.emplace_back(win.count(l), 0.0);
  if (scale == 0.0) return pick(acc, win, params.tau, 0.0);
  const double inv = 1.0 / scale;

  if (params.kind == SpaceKind::B) {
    for (const auto& lf : f.levels) {
      if (lf.level < win.j_min) continue;
      const double vol = std::pow(std::ldexp(edge, -lf.res), n);
      std::vector<double> cur(lf.values.size());
      for (std::size_t k = 0; k < cur.size(); ++k)
        cur[k] = p_inf ? lf.values[k] * inv : vol * std::pow(lf.values[k] * inv, params.p);
      const int top = std::min(lf.level, win.j_max);
      for (int r = lf.res; r >= win.j_min; --r) {
        if (r <= top) {
          auto& row = acc[static_cast<std::size_t>(r - win.j_min)];
          for (std::size_t k = 0; k < row.size(); ++k) {
            const double norm_p = p_inf ? cur[k] : std::pow(cur[k], 1.0 / params.p);
            if (q_inf)
              row[k] = std::max(row[k], norm_p);
            else
              row[k] += std::pow(norm_p, params.q);
          }
        }
        if (r > win.j_min) cur = coarsen_once(cur, n, r, p_inf);
      }
    }
    if (!q_inf)
      for (auto& row : acc)
        for (double& v : row) v = std::pow(v, 1.0 / params.q);
    return pick(acc, win, params.tau, scale);
  }

  // F-kind: G_l = sum_{j >= l} |f_j|^q on the finest resolution present.
  int fine = win.j_max;
  for (const auto& lf : f.levels)
    if (lf.level >= win.j_min) fine = std::max(fine, lf.res);
  const double vol = std::pow(std::ldexp(edge, -fine), n);
  std::vector<double> g(cells(n, fine), 0.0), expanded(g.size());
  std::vector<const LevelField*> order;
  for (const auto& lf : f.levels)
    if (lf.level >= win.j_min) order.push_back(&lf);
  std::stable_sort(order.begin(), order.end(), [](const LevelField* a, const LevelField* b) { return a->level > b->level; });
  std::map<int, std::vector<std::size_t>> maps;
  std::size_t next = 0;
  for (int l = win.j_max; l >= win.j_min; --l) {
    for (; next < order.size() && order[next]->level >= l; ++next) {
      const LevelField& lf = *order[next];
      auto it = maps.find(lf.res);
      if (it == maps.end()) it = maps.emplace(lf.res, ancestor_map(n, fine, lf.res)).first;
      for (std::size_t k = 0; k < g.size(); ++k) expanded[k] = lf.values[it->second[k]] * inv;
      if (q_inf)
        simd::accumulate_max(g, expanded);
      else
        simd::accumulate_pow(g, expanded, params.q);
    }
    std::vector<double> cur(g.size());
    const double e = q_inf ? params.p : params.p / params.q;
    for (std::size_t k = 0; k < g.size(); ++k) cur[k] = vol * (e == 1.0 ? g[k] : std::pow(g[k], e));
    for (int r = fine; r > l; --r) cur = coarsen_once(cur, n, r, false);
    auto& row = acc[static_cast<std::size_t>(l - win.j_min)];
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = std::pow(cur[k], 1.0 / params.p);
  }
  return pick(acc, win, params.tau, scale);
}

NormResult finfty_norm(const LevelFamily& f, double q, const CubeWindow& win) {
  if (!(q > 0.0)) throw InvalidArgumentError("q must lie in (0, inf]");
  check_family(f, win);
  const int n = f.n;
  const double edge = f.base.edge();
  const double scale = global_max(f, win.j_min);
  std::vector<std::vector<double>> acc;
  for (int l = win.j_min; l <= win.j_max; ++l) acc.emplace_back(win.count(l), 0.0);
  if (scale == 0.0) return pick(acc, win, 0.0, 0.0);
  const double inv = 1.0 / scale;
  const bool q_inf = std::isinf(q);
  // Integrals of |f_j|^q over every P with j_P <= j are additive in j.
  for (const auto& lf : f.levels) {
    if (lf.level < win.j_min) continue;
    const double vol = std::pow(std::ldexp(edge, -lf.res), n);
    std::vector<double> cur(lf.values.size());
    for (std::size_t k = 0; k < cur.size(); ++k)
      cur[k] = q_inf ? lf.values[k] * inv : vol * std::pow(lf.values[k] * inv, q);
    for (int r = lf.res; r >= win.j_min; --r) {
      if (r <= std::min(lf.level, win.j_max)) {
        auto& row = acc[static_cast<std::size_t>(r - win.j_min)];
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = q_inf ? std::max(row[k], cur[k]) : row[k] + cur[k];
      }
      if (r > win.j_min) cur = coarsen_once(cur, n, r, q_inf);
    }
  }
  if (!q_inf)
    for (int l = win.j_min; l <= win.j_max; ++l) {
      const double vol = std::pow(std::ldexp(edge, -l), n);
      for (double& v : acc[static_cast<std::size_t>(l - win.j_min)]) v = std::pow(v / vol, 1.0 / q);
    }
  return pick(acc, win, 0.0, scale);
}

Weighting Weighting::by_weight(const MatrixWeight& w, double p, int sample_bits) {
  Weighting out;
  out.kind = WeightingKind::weight;
  out.weight = &w;
  out.order = p;
  out.sample_bits = sample_bits;
  return out;
}

Weighting Weighting::by_family(const ReducingFamily& fam) {
  Weighting out;
  out.kind = WeightingKind::family;
  out.family = &fam;
  out.order = fam.order();
  return out;
}

LevelFamily level_fields(const CoefficientField& t, double s, const Weighting& wt, const LevelOptions& opt) {
  const CubeWindow& win = t.window;
  const int n = win.n;
  const std::size_t m = static_cast<std::size_t>(t.m);
  LevelFamily out{n, win.base, {}};
  const double edge = win.base.edge();

  std::vector<Matrix> roots;
  std::vector<double> scalar_roots;
  int sample_res = -1;
  if (wt.kind == WeightingKind::weight) {
    if (!wt.weight) throw InvalidArgumentError("weight weighting without a weight");
    if (wt.weight->space_dim() != n) throw InvalidArgumentError("weight dimension does not match the window");
    if (wt.weight->matrix_dim() != t.m) throw InvalidArgumentError("weight size does not match the coefficients");
    sample_res = wt.sample_bits >= 0 ? wt.sample_bits : win.j_max + 2;
    if (sample_res < win.j_max + (opt.selected_half ? 1 : 0))
      throw ResolutionError("weight sampling is coarser than the window");
    const Grid grid{n, sample_res, win.base};
    if (wt.weight->is_scalar()) {
      scalar_roots.resize(grid.size());
      parallel_for(grid.size(), [&](std::size_t k) {
        scalar_roots[k] = wt.weight->scalar_power(grid.midpoint(k), 1.0 / wt.order);
      });
    } else {
      roots.resize(grid.size());
      parallel_for(grid.size(), [&](std::size_t k) { roots[k] = wt.weight->power(grid.midpoint(k), 1.0 / wt.order); });
    }
  } else if (wt.kind == WeightingKind::family) {
    if (!wt.family) throw InvalidArgumentError("family weighting without a family");
    if (wt.family->matrix_dim() != t.m) throw InvalidArgumentError("family size does not match the coefficients");
  }

  std::size_t off = 0;
  for (int j = win.j_min; j <= win.j_max; ++j) {
    const std::size_t count = win.count(j);
    const double side = std::ldexp(edge, -j);
    const double factor = std::pow(side, -s) * std::pow(side, -0.5 * n);
    const auto cubes = win.level_cubes(j);
    LevelField lf;
    lf.level = j;
    if (wt.kind == WeightingKind::weight) {
      lf.res = sample_res;
      const auto owner = ancestor_map(n, sample_res, j);
      lf.values.resize(owner.size());
      const int shift = sample_res - j - 1;
      const std::size_t per = std::size_t{1} << sample_res;
      for (std::size_t k = 0; k < owner.size(); ++k) {
        if (opt.selected_half) {
          const std::size_t i0 = (k / cells(n - 1, sample_res)) % per;
          if ((i0 >> shift) & 1U) continue;
        }
        const cplx* tq = t.values.data() + (off + owner[k]) * m;
        if (!scalar_roots.empty()) {
          double nn = 0.0;
          for (std::size_t c = 0; c < m; ++c) nn += std::norm(tq[c]);
          lf.values[k] = factor * scalar_roots[k] * std::sqrt(nn);
        } else {
          Vector z(t.m);
          for (std::size_t c = 0; c < m; ++c) z(static_cast<Eigen::Index>(c)) = tq[c];
          lf.values[k] = factor * (roots[k] * z).norm();
        }
      }
    } else {
      std::vector<double> per_cube(count);
      for (std::size_t k = 0; k < count; ++k) {
        Vector z(t.m);
        for (std::size_t c = 0; c < m; ++c) z(static_cast<Eigen::Index>(c)) = t.values[(off + k) * m + c];
        per_cube[k] = factor * (wt.kind == WeightingKind::family ? (wt.family->at(cubes[k]).matrix() * z).norm() : z.norm());
      }
      if (opt.selected_half) {
        lf.res = j + 1;
        const auto owner = ancestor_map(n, j + 1, j);
        lf.values.resize(owner.size());
        const std::size_t per = std::size_t{1} << (j + 1);
        for (std::size_t k = 0; k < owner.size(); ++k) {
          const std::size_t i0 = (k / cells(n - 1, j + 1)) % per;
          lf.values[k] = (i0 & 1U) ? 0.0 : per_cube[owner[k]];
        }
      } else {
        lf.res = j;
        lf.values = std::move(per_cube);
      }
    }
    out.levels.push_back(std::move(lf));
    off += count;
  }
  return out;
}

NormResult seq_norm(const CoefficientField& t, const SpaceParams& params, const Weighting& weighting,
                    const LevelOptions& opt) {
  params.validate();
  const LevelFamily f = level_fields(t, params.s, weighting, opt);
  if (std::isinf(params.p) && params.kind == SpaceKind::F) return finfty_norm(f, params.q, t.window);
  return la_tau_norm(f, params, t.window);
}

NormResult finfty_norm(const CoefficientField& t, double s, double q, const Weighting& weighting) {
  return finfty_norm(level_fields(t, s, weighting), q, t.window);
}

CoefficientField maximal_sequence(const CoefficientField& t, double r, double lambda) {
  if (!(r > 0.0)) throw InvalidArgumentError("maximal sequence needs r > 0");
  if (!(lambda >= 0.0)) throw InvalidArgumentError("maximal sequence needs lambda >= 0");
  const CubeWindow& win = t.window;
  const std::size_t m = static_cast<std::size_t>(t.m);
  CoefficientField out = CoefficientField::zeros(win, 1);
  std::vector<double> mag(win.total());
  for (std::size_t k = 0; k < mag.size(); ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) s += std::norm(t.values[k * m + c]);
    mag[k] = std::sqrt(s);
  }
  const double top = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  if (top == 0.0) return out;
  const bool r_inf = std::isinf(r);
  std::size_t off = 0;
  for (int j = win.j_min; j <= win.j_max; ++j) {
    const auto cubes = win.level_cubes(j);
    const std::size_t count = cubes.size();
    parallel_for(count, [&](std::size_t a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < count; ++b) {
        const double v = mag[off + b] / top;
        if (v == 0.0) continue;
        double d2 = 0.0;
        for (int i = 0; i < win.n; ++i) {
          const double d = static_cast<double>(cubes[a].index[ax(i)] - cubes[b].index[ax(i)]);
          d2 += d * d;
        }
        const double decay = std::pow(1.0 + std::sqrt(d2), -lambda);
        if (r_inf)
          acc = std::max(acc, v * decay);
        else
          acc += std::pow(v, r) * decay;
      }
      out.values[off + a] = top * (r_inf ? acc : std::pow(acc, 1.0 / r));
    });
    off += count;
  }
  return out;
}

bool IdentityReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return !c.applicable || c.passed; });
}

IdentityReport identity_checks(const CoefficientField& t, const SpaceParams& params, const Weighting& weighting) {
  params.validate();
  constexpr double kRel = 1e-12;
  const int n = t.window.n;
  const double p = params.p, q = params.q, tau = params.tau, s = params.s;
  const bool p_fin = std::isfinite(p);
  IdentityReport rep;

  IdentityCheck chain;
  chain.name = "embedding_chain";
  if (!p_fin) {
    chain.reason = "needs finite p";
  } else {
    chain.applicable = true;
    const double lo = seq_norm(t, {s, tau, p, std::max(p, q), SpaceKind::B}, weighting).value;
    const double mid = seq_norm(t, {s, tau, p, q, SpaceKind::F}, weighting).value;
    const double hi = seq_norm(t, {s, tau, p, std::min(p, q), SpaceKind::B}, weighting).value;
    chain.lhs = lo;
    chain.rhs = hi;
    chain.bound = mid;
    chain.passed = lo <= mid * (1.0 + kRel) && mid <= hi * (1.0 + kRel);
  }
  rep.checks.push_back(chain);

  const double inv_p = p_fin ? 1.0 / p : 0.0;
  const double shifted = s + n * (tau - inv_p);
  IdentityCheck boundary;
  boundary.name = "supercritical_boundary_equality";
  if (!p_fin || tau != inv_p || !std::isinf(q)) {
    boundary.reason = "needs tau = 1/p and q = infinity";
  } else {
    boundary.applicable = true;
    boundary.lhs = seq_norm(t, params, weighting).value;
    boundary.rhs = finfty_norm(t, shifted, kInf, weighting).value;
    boundary.bound = boundary.rhs > 0.0 ? std::abs(boundary.lhs - boundary.rhs) / boundary.rhs : std::abs(boundary.lhs);
    boundary.passed = boundary.bound <= kRel;
  }
  rep.checks.push_back(boundary);

  IdentityCheck above;
  above.name = "supercritical_two_sided";
  if (!p_fin || !(tau > inv_p)) {
    above.reason = "needs tau > 1/p";
  } else {
    above.applicable = true;
    above.lhs = seq_norm(t, params, weighting).value;
    above.rhs = finfty_norm(t, shifted, kInf, weighting).value;
    above.bound = std::isinf(q) ? 1.0 : std::pow(1.0 / (1.0 - std::exp2(-n * q * (tau - inv_p))), 1.0 / q);
    above.passed = above.rhs <= above.lhs * (1.0 + kRel) && above.lhs <= above.bound * above.rhs * (1.0 + kRel);
  }
  rep.checks.push_back(above);

  IdentityCheck sup_paths;
  sup_paths.name = "q_infinity_paths";
  sup_paths.applicable = true;
  {
    const LevelFamily f = level_fields(t, s, weighting);
    sup_paths.lhs = finfty_norm(f, kInf, t.window).value;
    sup_paths.rhs = la_tau_norm(f, {s, 0.0, kInf, kInf, SpaceKind::B}, t.window).value;
    sup_paths.bound = sup_paths.rhs > 0.0 ? std::abs(sup_paths.lhs - sup_paths.rhs) / sup_paths.rhs : std::abs(sup_paths.lhs);
    sup_paths.passed = sup_paths.bound <= kRel;
  }
  rep.checks.push_back(sup_paths);

  IdentityCheck ratio;
  ratio.name = "q_scale_ratio";
  if (!p_fin) {
    ratio.reason = "needs finite p";
  } else {
    ratio.applicable = true;
    ratio.lhs = finfty_norm(t, s, q, weighting).value;
    ratio.rhs = seq_norm(t, {s, inv_p, p, q, SpaceKind::F}, weighting).value;
    ratio.bound = ratio.rhs > 0.0 ? ratio.lhs / ratio.rhs : 1.0;
    ratio.passed = std::isfinite(ratio.bound);
  }
  rep.checks.push_back(ratio);
  return rep;
}

nlohmann::json to_json(const IdentityReport& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : r.checks)
    out.push_back({{"name", c.name},
                   {"applicable", c.applicable},
                   {"passed", c.passed},
                   {"reason", c.reason},
                   {"lhs", c.lhs},
                   {"rhs", c.rhs},
                   {"bound", c.bound}});
  return out;
}

}  // namespace mwt
