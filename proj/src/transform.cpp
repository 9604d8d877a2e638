#include "mwt/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "mwt/errors.hpp"
#include "mwt/parallel.hpp"
#include "mwt/simd.hpp"

namespace mwt {

namespace {

std::size_t ax(int i) { return static_cast<std::size_t>(i); }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Plans are created once per (dimension, size, direction) and executed on
// caller-owned buffers, which FFTW allows from any thread.
fftw_plan plan_for(int n, int bits, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_tuple(n, bits, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  int dims[kMaxSpaceDim];
  for (int i = 0; i < n; ++i) dims[i] = 1 << bits;
  std::vector<cplx> scratch(std::size_t{1} << (bits * n));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = fftw_plan_dft(n, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw InvalidArgumentError("FFTW could not plan a transform");
  plans.emplace(key, p);
  return p;
}

void fft_inplace(std::vector<cplx>& data, int n, int bits, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(n, bits, sign), buf, buf);
}

// Signed mode numbers of an FFT-grid index.
std::array<std::int64_t, kMaxSpaceDim> modes_of(std::size_t flat, int n, int bits) {
  const std::size_t per = std::size_t{1} << bits;
  std::array<std::int64_t, kMaxSpaceDim> k{};
  for (int i = n - 1; i >= 0; --i) {
    const auto v = static_cast<std::int64_t>(flat % per);
    k[ax(i)] = v < static_cast<std::int64_t>(per / 2) ? v : v - static_cast<std::int64_t>(per);
    flat /= per;
  }
  return k;
}

std::size_t fold(const std::array<std::int64_t, kMaxSpaceDim>& k, int n, int bits) {
  const std::int64_t per = std::int64_t{1} << bits;
  std::size_t flat = 0;
  for (int i = 0; i < n; ++i) {
    std::int64_t v = k[ax(i)] % per;
    if (v < 0) v += per;
    flat = flat * static_cast<std::size_t>(per) + static_cast<std::size_t>(v);
  }
  return flat;
}

double bump(double v, int power) {
  const double a = 1.0 - v * v;
  return a > 0.0 ? std::pow(a, power) : 0.0;
}

std::vector<cplx> component(const std::vector<cplx>& data, int m, int c) {
  std::vector<cplx> out(data.size() / static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = data[k * static_cast<std::size_t>(m) + ax(c)];
  return out;
}

void check_grid(const GridFunction& f, const FilterPair& filters) {
  if (f.grid.n != filters.n || f.grid.bits != filters.bits)
    throw InvalidArgumentError("function grid does not match the filter grid");
}

// Spectrum of f, one array per component.
std::vector<std::vector<cplx>> spectra(const GridFunction& f) {
  std::vector<std::vector<cplx>> out;
  const double norm = 1.0 / static_cast<double>(f.grid.size());
  for (int c = 0; c < f.m; ++c) {
    auto v = component(f.values, f.m, c);
    fft_inplace(v, f.grid.n, f.grid.bits, FFTW_FORWARD);
    for (auto& z : v) z *= norm;
    out.push_back(std::move(v));
  }
  return out;
}

// Values of phi_j * f at every grid node, node-major with m components.
std::vector<cplx> scale_values(const std::vector<std::vector<cplx>>& spec, const FilterPair& filters, int j) {
  const std::size_t m = spec.size();
  const auto& mult = filters.phi[static_cast<std::size_t>(j - filters.j_min)];
  std::vector<cplx> out(mult.size() * m);
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<cplx> v = spec[c];
    simd::spectral_scale(v, mult);
    fft_inplace(v, filters.n, filters.bits, FFTW_BACKWARD);
    for (std::size_t k = 0; k < v.size(); ++k) out[k * m + c] = v[k];
  }
  return out;
}

void check_scale(const FilterPair& f, int j) {
  if (j < f.j_min || j > f.j_max)
    throw InvalidArgumentError("scale " + std::to_string(j) + " is outside the filter range");
}

}  // namespace

double phi_hat(double xi_norm, int order) {
  if (!(xi_norm > 0.0)) return 0.0;
  return bump(std::log2(xi_norm), order);
}

double psi_hat(double xi_norm, int order) {
  if (!(xi_norm > 0.0)) return 0.0;
  const double u = std::log2(xi_norm);
  if (std::abs(u) >= 1.0) return 0.0;
  const double f = u - std::floor(u);
  const double denom = bump(f, 2 * order) + bump(f - 1.0, 2 * order);
  return bump(u, order) / denom;
}

std::vector<double> FilterPair::frequency_norms() const {
  const std::size_t size = std::size_t{1} << (bits * n);
  std::vector<double> out(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto k = modes_of(i, n, bits);
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += static_cast<double>(k[ax(a)] * k[ax(a)]);
    out[i] = kTwoPi * std::sqrt(s);
  }
  return out;
}

bool FilterPair::resolvable(double xi_norm) const {
  return xi_norm >= std::ldexp(1.0, j_min) && xi_norm <= std::ldexp(1.0, j_max);
}

FilterPair build_filters(const FilterSpec& spec) {
  if (spec.n < 1 || spec.n > kMaxSpaceDim) throw InvalidArgumentError("filters need n in 1..3");
  if (spec.order < 1) throw InvalidArgumentError("filter order must be at least 1");
  if (spec.bits < 1 || spec.bits * spec.n > 26) throw InvalidArgumentError("filter grid size out of range");
  FilterPair f;
  f.n = spec.n;
  f.bits = spec.bits;
  f.order = spec.order;
  f.j_min = spec.j_min;
  f.j_max = spec.j_max < 0 ? spec.bits : spec.j_max;
  if (f.j_min < 2) throw ResolutionError("scales below 2 see no nonzero mode on the unit torus");
  if (f.j_max > spec.bits)
    throw ResolutionError("scale " + std::to_string(f.j_max) + " exceeds the grid Nyquist band");
  if (f.j_max < f.j_min) throw ResolutionError("the grid cannot hold one full annulus");
  const std::vector<double> xi = f.frequency_norms();
  for (int j = f.j_min; j <= f.j_max; ++j) {
    std::vector<double> ph(xi.size()), ps(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
      const double x = std::ldexp(xi[i], -j);
      ph[i] = phi_hat(x, f.order);
      ps[i] = psi_hat(x, f.order);
    }
    f.phi.push_back(std::move(ph));
    f.psi.push_back(std::move(ps));
  }
  return f;
}

double partition_error(const FilterPair& f) {
  const std::vector<double> xi = f.frequency_norms();
  double worst = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (!f.resolvable(xi[i])) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < f.phi.size(); ++j) s += f.phi[j][i] * f.psi[j][i];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double lower_bound(const FilterPair& f) {
  double lo = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 4001;
  for (int k = 0; k < kSamples; ++k) {
    const double x = 0.6 + (5.0 / 3.0 - 0.6) * k / (kSamples - 1);
    lo = std::min({lo, std::abs(phi_hat(x, f.order)), std::abs(psi_hat(x, f.order))});
  }
  return lo;
}

GridFunction to_values(const std::vector<cplx>& coefficients, const Grid& grid, int m) {
  if (coefficients.size() != grid.size() * static_cast<std::size_t>(m))
    throw InvalidArgumentError("coefficient count does not match the grid");
  GridFunction out = GridFunction::zeros(grid, m, true);
  for (int c = 0; c < m; ++c) {
    auto v = component(coefficients, m, c);
    fft_inplace(v, grid.n, grid.bits, FFTW_BACKWARD);
    for (std::size_t k = 0; k < v.size(); ++k) out.values[k * static_cast<std::size_t>(m) + ax(c)] = v[k];
  }
  return out;
}

std::vector<cplx> to_coefficients(const GridFunction& f) {
  const auto spec = spectra(f);
  std::vector<cplx> out(f.values.size());
  const std::size_t m = static_cast<std::size_t>(f.m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t k = 0; k < spec[c].size(); ++k) out[k * m + c] = spec[c][k];
  return out;
}

GridFunction resample(const GridFunction& f, int bits) {
  const int n = f.grid.n;
  const Grid target{n, bits, f.grid.domain};
  const auto coef = to_coefficients(f);
  const std::size_t m = static_cast<std::size_t>(f.m);
  const std::int64_t half = std::int64_t{1} << (bits - 1);
  std::vector<cplx> out(target.size() * m);
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const auto k = modes_of(i, n, f.grid.bits);
    bool fits = true;
    for (int a = 0; a < n; ++a) fits = fits && k[ax(a)] > -half && k[ax(a)] < half;
    if (!fits) continue;
    const std::size_t dst = fold(k, n, bits);
    for (std::size_t c = 0; c < m; ++c) out[dst * m + c] = coef[i * m + c];
  }
  return to_values(out, target, f.m);
}

GridFunction random_band_limited(const FilterPair& filters, int m, std::mt19937_64& rng) {
  const std::vector<double> xi = filters.frequency_norms();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<cplx> coef(xi.size() * static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (!filters.resolvable(xi[i])) continue;
    for (int c = 0; c < m; ++c) {
      const double r = std::sqrt(unit(rng));
      const double th = kTwoPi * unit(rng);
      coef[i * static_cast<std::size_t>(m) + ax(c)] = std::polar(r, th);
    }
  }
  return to_values(coef, filters.grid(), m);
}

double spectral_leakage(const GridFunction& f, double lo, double hi) {
  const auto coef = to_coefficients(f);
  const std::size_t m = static_cast<std::size_t>(f.m);
  double inside = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const auto k = modes_of(i, f.grid.n, f.grid.bits);
    double s = 0.0;
    for (int a = 0; a < f.grid.n; ++a) s += static_cast<double>(k[ax(a)] * k[ax(a)]);
    const double x = kTwoPi * std::sqrt(s);
    for (std::size_t c = 0; c < m; ++c) {
      const double v = std::abs(coef[i * m + c]);
      if (x >= lo && x <= hi)
        inside = std::max(inside, v);
      else
        outside = std::max(outside, v);
    }
  }
  const double top = std::max(inside, outside);
  return top > 0.0 ? outside / top : 0.0;
}

GridFunction convolve_scale(const GridFunction& f, const FilterPair& filters, int j) {
  check_grid(f, filters);
  check_scale(filters, j);
  GridFunction out = GridFunction::zeros(f.grid, f.m, true);
  out.values = scale_values(spectra(f), filters, j);
  return out;
}

CoefficientField analyze(const GridFunction& f, const FilterPair& filters) {
  check_grid(f, filters);
  const int n = filters.n;
  const std::size_t m = static_cast<std::size_t>(f.m);
  CoefficientField t = CoefficientField::zeros(filters.window(), f.m);
  const auto spec = spectra(f);
  std::size_t off = 0;
  for (int j = filters.j_min; j <= filters.j_max; ++j) {
    const auto& mult = filters.phi[static_cast<std::size_t>(j - filters.j_min)];
    const std::size_t small = std::size_t{1} << (j * n);
    const double scale = std::ldexp(1.0, -j * n / 2) * (j * n % 2 ? std::numbers::sqrt2 / 2.0 : 1.0);
    for (std::size_t c = 0; c < m; ++c) {
      // phi_j * f is band-limited well inside the Nyquist band of the level-j
      // lattice, so its samples at x_Q come from an inverse FFT of size 2^j.
      std::vector<cplx> folded(small);
      for (std::size_t i = 0; i < mult.size(); ++i)
        if (mult[i] != 0.0) folded[fold(modes_of(i, n, filters.bits), n, j)] += mult[i] * spec[c][i];
      fft_inplace(folded, n, j, FFTW_BACKWARD);
      for (std::size_t k = 0; k < small; ++k) t.values[(off + k) * m + c] = scale * folded[k];
    }
    off += small;
  }
  return t;
}

GridFunction synthesize(const CoefficientField& t, const FilterPair& filters) {
  const int n = filters.n;
  if (t.window.n != n || t.window.j_min != filters.j_min || t.window.j_max != filters.j_max)
    throw InvalidArgumentError("coefficient window does not match the filter window");
  const std::size_t m = static_cast<std::size_t>(t.m);
  const Grid grid = filters.grid();
  std::vector<cplx> coef(grid.size() * m);
  std::size_t off = 0;
  for (int j = filters.j_min; j <= filters.j_max; ++j) {
    const auto& mult = filters.psi[static_cast<std::size_t>(j - filters.j_min)];
    const std::size_t small = std::size_t{1} << (j * n);
    const double scale = std::ldexp(1.0, -j * n / 2) * (j * n % 2 ? std::numbers::sqrt2 / 2.0 : 1.0);
    for (std::size_t c = 0; c < m; ++c) {
      std::vector<cplx> spikes(small);
      for (std::size_t k = 0; k < small; ++k) spikes[k] = t.values[(off + k) * m + c];
      fft_inplace(spikes, n, j, FFTW_FORWARD);
      for (std::size_t i = 0; i < mult.size(); ++i)
        if (mult[i] != 0.0) coef[i * m + c] += scale * mult[i] * spikes[fold(modes_of(i, n, filters.bits), n, j)];
    }
    off += small;
  }
  return to_values(coef, grid, t.m);
}

GridFunction lifting(const GridFunction& f, double sigma) {
  auto coef = to_coefficients(f);
  const std::size_t m = static_cast<std::size_t>(f.m);
  double top = 0.0;
  for (const cplx& z : coef) top = std::max(top, std::abs(z));
  for (std::size_t c = 0; c < m; ++c)
    if (std::abs(coef[c]) > 1e-12 * std::max(top, 1e-300))
      throw PreconditionError("lifting needs a function with zero mean");
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const auto k = modes_of(i, f.grid.n, f.grid.bits);
    double s = 0.0;
    for (int a = 0; a < f.grid.n; ++a) s += static_cast<double>(k[ax(a)] * k[ax(a)]);
    const double mult = i == 0 ? 0.0 : std::pow(kTwoPi * std::sqrt(s), sigma);
    for (std::size_t c = 0; c < m; ++c) coef[i * m + c] *= mult;
  }
  return to_values(coef, f.grid, f.m);
}

LevelFamily function_level_fields(const GridFunction& f, const FilterPair& filters, double s,
                                  const Weighting& wt) {
  check_grid(f, filters);
  const Grid grid = filters.grid();
  const int n = filters.n;
  const std::size_t m = static_cast<std::size_t>(f.m);
  std::vector<Matrix> roots;
  std::vector<double> scalar_roots;
  if (wt.kind == WeightingKind::weight) {
    if (!wt.weight) throw InvalidArgumentError("weight weighting without a weight");
    if (wt.weight->space_dim() != n || wt.weight->matrix_dim() != f.m)
      throw InvalidArgumentError("weight shape does not match the function");
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
    if (wt.family->matrix_dim() != f.m) throw InvalidArgumentError("family size does not match the function");
    if (!wt.family->window().base.inside(grid.domain) || !grid.domain.inside(wt.family->window().base))
      throw CoverageError("reducing family must live on the unit torus");
  }
  const auto spec = spectra(f);
  LevelFamily out{n, grid.domain, {}};
  out.levels.resize(static_cast<std::size_t>(filters.j_max - filters.j_min + 1));
  parallel_for(out.levels.size(), [&](std::size_t li) {
    const int j = filters.j_min + static_cast<int>(li);
    const std::vector<cplx> vals = scale_values(spec, filters, j);
    const double factor = std::exp2(j * s);
    LevelField lf{j, filters.bits, std::vector<double>(grid.size())};
    std::vector<Matrix> fam;
    if (wt.kind == WeightingKind::family) {
      if (!wt.family->covers_level(j)) throw CoverageError("reducing family does not cover level " + std::to_string(j));
      fam = wt.family->level_field(j).matrices;
    }
    const int shift = filters.bits - j;
    const std::size_t per = std::size_t{1} << filters.bits;
    const std::size_t cper = std::size_t{1} << j;
    Vector z(f.m);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      for (std::size_t c = 0; c < m; ++c) z(static_cast<Eigen::Index>(c)) = vals[k * m + c];
      double v;
      switch (wt.kind) {
        case WeightingKind::unweighted: v = z.norm(); break;
        case WeightingKind::weight: v = scalar_roots.empty() ? (roots[k] * z).norm() : scalar_roots[k] * z.norm(); break;
        case WeightingKind::family: {
          std::size_t rest = k, owner = 0, mult = 1;
          for (int a = n - 1; a >= 0; --a) {
            owner += ((rest % per) >> shift) * mult;
            mult *= cper;
            rest /= per;
          }
          v = (fam[owner] * z).norm();
          break;
        }
        default: v = 0.0;
      }
      lf.values[k] = factor * v;
    }
    out.levels[li] = std::move(lf);
  });
  return out;
}

NormResult function_norm(const GridFunction& f, const FilterPair& filters, const SpaceParams& params,
                         const Weighting& weighting) {
  params.validate();
  const LevelFamily fields = function_level_fields(f, filters, params.s, weighting);
  if (std::isinf(params.p) && params.kind == SpaceKind::F) return finfty_norm(fields, params.q, filters.window());
  return la_tau_norm(fields, params, filters.window());
}

CoefficientField peetre_sup(const GridFunction& f, const FilterPair& filters, const ReducingFamily& family) {
  check_grid(f, filters);
  if (family.matrix_dim() != f.m) throw InvalidArgumentError("family size does not match the function");
  if (!family.window().base.inside(f.grid.domain) || !f.grid.domain.inside(family.window().base))
    throw CoverageError("reducing family must live on the unit torus");
  const int n = filters.n;
  const std::size_t m = static_cast<std::size_t>(f.m);
  const CubeWindow win = filters.window();
  CoefficientField out = CoefficientField::zeros(win, 1);
  const auto spec = spectra(f);
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (int j = win.j_min; j <= win.j_max; ++j) {
    offsets.push_back(off);
    off += win.count(j);
  }
  parallel_for(offsets.size(), [&](std::size_t li) {
    const int j = win.j_min + static_cast<int>(li);
    if (!family.covers_level(j)) throw CoverageError("reducing family does not cover level " + std::to_string(j));
    const std::vector<cplx> vals = scale_values(spec, filters, j);
    const auto fam = family.level_field(j).matrices;
    const std::size_t per = std::size_t{1} << filters.bits;
    const std::size_t cper = std::size_t{1} << j;
    const int shift = filters.bits - j;
    const double scale = std::pow(std::ldexp(1.0, -j), 0.5 * n);
    std::vector<double> best(win.count(j), 0.0);
    Vector z(f.m);
    for (std::size_t k = 0; k < vals.size() / m; ++k) {
      std::size_t rest = k, owner = 0, mult = 1;
      for (int a = n - 1; a >= 0; --a) {
        owner += ((rest % per) >> shift) * mult;
        mult *= cper;
        rest /= per;
      }
      for (std::size_t c = 0; c < m; ++c) z(static_cast<Eigen::Index>(c)) = vals[k * m + c];
      best[owner] = std::max(best[owner], (fam[owner] * z).norm());
    }
    for (std::size_t q = 0; q < best.size(); ++q) out.values[offsets[li] + q] = scale * best[q];
  });
  return out;
}

SpectralSamples filter_spectrum(const FilterPair& f, bool psi, int bits) {
  SpectralSamples s;
  s.n = f.n;
  s.bits = bits;
  s.period = std::ldexp(1.0, bits - 1);
  const std::size_t size = std::size_t{1} << (bits * f.n);
  s.hat.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto k = modes_of(i, f.n, bits);
    double q = 0.0;
    for (int a = 0; a < f.n; ++a) q += static_cast<double>(k[ax(a)] * k[ax(a)]);
    const double xi = kTwoPi * std::sqrt(q) / s.period;
    s.hat[i] = psi ? psi_hat(xi, f.order) : phi_hat(xi, f.order);
  }
  return s;
}

double schwartz_seminorm(const SpectralSamples& s, int M) {
  if (M < 0) throw InvalidArgumentError("seminorm order must be nonnegative");
  const int n = s.n;
  const std::size_t size = std::size_t{1} << (s.bits * n);
  if (s.hat.size() != size) throw InvalidArgumentError("spectral samples have the wrong size");
  const double h = s.period / static_cast<double>(std::size_t{1} << s.bits);
  const double norm = 1.0 / std::pow(s.period, n);
  // Enumerate multi-indices gamma with |gamma| <= M.
  std::vector<std::array<int, kMaxSpaceDim>> gammas;
  std::array<int, kMaxSpaceDim> g{};
  std::function<void(int, int)> rec = [&](int axis, int left) {
    if (axis == n) {
      gammas.push_back(g);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      g[ax(axis)] = v;
      rec(axis + 1, left - v);
    }
    g[ax(axis)] = 0;
  };
  rec(0, M);
  double best = 0.0;
  std::vector<cplx> buf(size);
  for (const auto& gm : gammas) {
    int order = 0;
    for (int a = 0; a < n; ++a) order += gm[ax(a)];
    for (std::size_t i = 0; i < size; ++i) {
      const auto k = modes_of(i, n, s.bits);
      cplx mult = s.hat[i] * norm;
      for (int a = 0; a < n; ++a)
        for (int r = 0; r < gm[ax(a)]; ++r) mult *= cplx(0.0, kTwoPi * static_cast<double>(k[ax(a)]) / s.period);
      buf[i] = mult;
    }
    fft_inplace(buf, n, s.bits, FFTW_BACKWARD);
    for (std::size_t i = 0; i < size; ++i) {
      const auto k = modes_of(i, n, s.bits);
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += std::pow(h * static_cast<double>(k[ax(a)]), 2);
      best = std::max(best, std::abs(buf[i]) * std::pow(1.0 + std::sqrt(r2), n + M + order));
    }
  }
  return best;
}

nlohmann::json filters_to_json(const FilterPair& f) {
  nlohmann::json rows = nlohmann::json::array();
  const std::size_t per = std::size_t{1} << f.bits;
  const std::size_t stride = std::size_t{1} << (f.bits * (f.n - 1));
  for (int j = f.j_min; j <= f.j_max; ++j) {
    const auto& ph = f.phi[static_cast<std::size_t>(j - f.j_min)];
    const auto& ps = f.psi[static_cast<std::size_t>(j - f.j_min)];
    for (std::size_t k = 0; k < per / 2; ++k) {
      const std::size_t i = k * stride;
      if (ph[i] == 0.0 && ps[i] == 0.0) continue;
      rows.push_back({{"j", j}, {"k", k}, {"xi", kTwoPi * static_cast<double>(k)}, {"phi_hat", ph[i]}, {"psi_hat", ps[i]}});
    }
  }
  return {{"n", f.n},
          {"bits", f.bits},
          {"order", f.order},
          {"j_min", f.j_min},
          {"j_max", f.j_max},
          {"partition_error", partition_error(f)},
          {"lower_bound", lower_bound(f)},
          {"rows", rows}};
}

void write_filters_csv(const FilterPair& f, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os.precision(17);
  os << "j,k,xi,phi_hat,psi_hat\n";
  for (const auto& row : filters_to_json(f)["rows"])
    os << row["j"].get<int>() << ',' << row["k"].get<std::size_t>() << ',' << row["xi"].get<double>() << ','
       << row["phi_hat"].get<double>() << ',' << row["psi_hat"].get<double>() << '\n';
}

}  // namespace mwt
