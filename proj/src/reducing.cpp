#include "mwt/reducing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "mwt/errors.hpp"
#include "mwt/parallel.hpp"

namespace mwt {

namespace {

std::size_t ax(int i) { return static_cast<std::size_t>(i); }

Matrix hermitian_root(const Matrix& h) { return matrix_power(PositiveMatrix(hermitian_part(h)), 0.5).matrix(); }

std::vector<Matrix> test_matrices(int m) {
  std::vector<Matrix> out;
  out.push_back(Matrix::Identity(m, m));
  for (int i = 0; i < m; ++i) {
    Matrix e = Matrix::Zero(m, m);
    e(i, i) = 1.0;
    out.push_back(e);
  }
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Matrix re = Matrix::Zero(m, m), im = Matrix::Zero(m, m);
      re(i, j) = re(j, i) = s;
      im(i, j) = cplx(0.0, -s);
      im(j, i) = cplx(0.0, s);
      out.push_back(re);
      out.push_back(im);
    }
  return out;
}

std::vector<Vector> verification_directions(int m, int fitting, int extra) {
  std::vector<Vector> dirs = sphere_directions(m, fitting);
  std::mt19937_64 rng(0x5eed0001ULL);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < extra; ++k) {
    Vector z(m);
    for (int i = 0; i < m; ++i) z(i) = cplx(g(rng), g(rng));
    dirs.push_back(z / z.norm());
  }
  return dirs;
}

void widen(Bracket& b, double v, bool& first) {
  if (first) {
    b.lo = b.hi = v;
    first = false;
  } else {
    b.lo = std::min(b.lo, v);
    b.hi = std::max(b.hi, v);
  }
}

ReduceResult reduce_with(const CubeNorm& rho, int m, double p, const ReduceOptions& opt, bool scalar) {
  ReduceMethod method = opt.method;
  if (method == ReduceMethod::automatic)
    method = scalar ? ReduceMethod::exact_scalar : (p == 2.0 ? ReduceMethod::exact_p2 : ReduceMethod::mvee);
  switch (method) {
    case ReduceMethod::identity: return {PositiveMatrix::identity(m), method, 0};
    case ReduceMethod::exact_scalar: {
      if (!scalar) throw InvalidArgumentError("exact_scalar reduction needs a scalar weight");
      Vector e = Vector::Zero(m);
      e(0) = 1.0;
      return {PositiveMatrix::scalar(m, rho(e)), method, 0};
    }
    case ReduceMethod::exact_p2: {
      if (p != 2.0) throw InvalidArgumentError("exact_p2 reduction needs p = 2");
      return {PositiveMatrix(HermitianMatrix(hermitian_root(rho.average_power()), 1e-10)), method, 0};
    }
    case ReduceMethod::mvee: {
      const std::vector<Vector> dirs = sphere_directions(m, opt.directions);
      std::vector<Vector> pts;
      pts.reserve(dirs.size());
      for (const Vector& z : dirs) {
        const double r = rho(z);
        if (!(r > 0.0) || !std::isfinite(r)) throw DegenerateMatrixError("cube norm vanishes on a direction");
        pts.push_back(z / r);
      }
      const MveeResult fit = mvee(pts, opt.mvee_tol, opt.mvee_max_iter);
      return {PositiveMatrix(HermitianMatrix(hermitian_root(fit.h), 1e-10)), method, fit.iterations};
    }
    case ReduceMethod::automatic: break;
  }
  throw InvalidArgumentError("unknown reduction method");
}

std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

nlohmann::json matrix_json(const Matrix& a) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.push_back({a(r, c).real(), a(r, c).imag()});
  return out;
}

Matrix matrix_from_json(const nlohmann::json& j, int m) {
  if (!j.is_array() || static_cast<int>(j.size()) != m * m) throw FormatError("family: matrix has the wrong size");
  Matrix a(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      const auto& e = j[static_cast<std::size_t>(r * m + c)];
      a(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return a;
}

}  // namespace

std::string to_string(ReduceMethod m) {
  switch (m) {
    case ReduceMethod::automatic: return "auto";
    case ReduceMethod::exact_scalar: return "exact_scalar";
    case ReduceMethod::exact_p2: return "exact_p2";
    case ReduceMethod::mvee: return "mvee";
    case ReduceMethod::identity: return "identity";
  }
  return "unknown";
}

ReduceMethod reduce_method_from_string(const std::string& s) {
  if (s == "auto") return ReduceMethod::automatic;
  if (s == "exact_scalar") return ReduceMethod::exact_scalar;
  if (s == "exact_p2") return ReduceMethod::exact_p2;
  if (s == "mvee") return ReduceMethod::mvee;
  if (s == "identity") return ReduceMethod::identity;
  throw InvalidArgumentError("unknown reduction method '" + s + "'");
}

CubeNorm::CubeNorm(const MatrixWeight& w, double p, const Box& region, const QuadratureSpec& quad)
    : p_(p), rel_tol_(quad.rel_tol), rule_(build_rule(region, w.singular_points(), quad)), scalar_(w.is_scalar()) {
  if (!(p > 0.0)) throw InvalidArgumentError("cube norm needs p > 0");
  if (scalar_) {
    scalar_w_.resize(rule_.size());
    for (std::size_t k = 0; k < rule_.size(); ++k) scalar_w_[k] = w.scalar_power(rule_.nodes[k], 1.0);
  } else {
    root_.resize(rule_.size());
    for (std::size_t k = 0; k < rule_.size(); ++k) root_[k] = w.power(rule_.nodes[k], 1.0 / p);
  }
}

double CubeNorm::operator()(const Vector& z) const {
  std::vector<double> v(rule_.size());
  if (scalar_) {
    const double zn = std::pow(z.norm(), p_);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = scalar_w_[k] * zn;
  } else {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow((root_[k] * z).norm(), p_);
  }
  return std::pow(average(rule_, v, rel_tol_), 1.0 / p_);
}

double CubeNorm::matrix_norm(const Matrix& m) const {
  std::vector<double> v(rule_.size());
  if (scalar_) {
    const double mn = std::pow(op_norm(m), p_);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = scalar_w_[k] * mn;
  } else {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(op_norm(root_[k] * m), p_);
  }
  return std::pow(average(rule_, v, rel_tol_), 1.0 / p_);
}

Matrix CubeNorm::average_power() const {
  if (scalar_) {
    std::vector<double> v(rule_.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(scalar_w_[k], 2.0 / p_);
    return Matrix::Identity(1, 1) * cplx(average(rule_, v, rel_tol_), 0.0);
  }
  const int m = static_cast<int>(root_.front().rows());
  std::vector<Matrix> sq(rule_.size());
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = root_[k] * root_[k].adjoint();
  std::vector<double> tr(rule_.size());
  for (std::size_t k = 0; k < tr.size(); ++k) tr[k] = sq[k].trace().real();
  const double trace_integral = integrate(rule_, tr, rel_tol_).value;
  Matrix out(m, m);
  std::vector<double> v(rule_.size());
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = sq[k](r, c).real();
      const double re = integrate(rule_, v, rel_tol_, trace_integral).value;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = sq[k](r, c).imag();
      const double im = integrate(rule_, v, rel_tol_, trace_integral).value;
      out(r, c) = cplx(re, im) / rule_.volume();
    }
  return out;
}

double cube_norm(const MatrixWeight& w, double p, const Box& region, const Vector& z, const QuadratureSpec& quad) {
  return CubeNorm(w, p, region, quad)(z);
}

ReduceResult reduce(const MatrixWeight& w, double p, const Box& region, const ReduceOptions& opt) {
  if (opt.method == ReduceMethod::identity) return {PositiveMatrix::identity(w.matrix_dim()), opt.method, 0};
  const CubeNorm rho(w, p, region, opt.quad);
  return reduce_with(rho, w.matrix_dim(), p, opt, w.is_scalar());
}

ReduceResult dual_reduce(const MatrixWeight& w, double p, const Box& region, const ReduceOptions& opt) {
  if (!(p > 1.0)) throw InvalidArgumentError("dual reducing operators need p > 1");
  return reduce(dual_weight(w, p), p / (p - 1.0), region, opt);
}

ReducingCheck verify_reducing(const PositiveMatrix& a, const CubeNorm& rho, int m, int directions) {
  ReducingCheck out;
  bool first = true;
  for (const Vector& z : verification_directions(m, directions, 64))
    widen(out.vectors, (a.matrix() * z).norm() / rho(z), first);
  first = true;
  for (const Matrix& t : test_matrices(m)) widen(out.matrices, op_norm(a.matrix() * t) / rho.matrix_norm(t), first);
  return out;
}

ReducingCheck verify_reducing(const PositiveMatrix& a, const MatrixWeight& w, double p, const Box& region,
                              int directions, const QuadratureSpec& quad) {
  return verify_reducing(a, CubeNorm(w, p, region, quad), w.matrix_dim(), directions);
}

ReducingFamily ReducingFamily::build(const MatrixWeight& w, double p, const CubeWindow& window,
                                     const ReduceOptions& opt) {
  if (!(p > 0.0)) throw InvalidArgumentError("reducing family needs p > 0");
  if (window.n != w.space_dim()) throw InvalidArgumentError("window dimension does not match the weight");
  ReducingFamily f;
  f.p_ = p;
  f.m_ = w.matrix_dim();
  f.window_ = window;
  f.method_ = opt.method == ReduceMethod::automatic
                  ? (w.is_scalar() ? ReduceMethod::exact_scalar : (p == 2.0 ? ReduceMethod::exact_p2 : ReduceMethod::mvee))
                  : opt.method;
  const std::vector<DyadicCube> cubes = window.all_cubes();
  std::size_t off = 0;
  for (int j = window.j_min; j <= window.j_max; ++j) {
    f.offsets_.push_back(off);
    off += window.count(j);
  }
  std::vector<std::optional<PositiveMatrix>> mats(cubes.size());
  f.diag_.resize(cubes.size());
  ReduceOptions fixed = opt;
  fixed.method = f.method_;
  parallel_for(cubes.size(), [&](std::size_t i) {
    const Box region = cube_box(cubes[i], window.base);
    if (fixed.method == ReduceMethod::identity) {
      mats[i] = PositiveMatrix::identity(f.m_);
      return;
    }
    const CubeNorm rho(w, p, region, fixed.quad);
    ReduceResult r = reduce_with(rho, f.m_, p, fixed, w.is_scalar());
    f.diag_[i].iterations = r.iterations;
    f.diag_[i].check = verify_reducing(r.a, rho, f.m_, std::max(64, fixed.directions));
    mats[i] = r.a;
  });
  f.mats_.reserve(cubes.size());
  f.inverses_.reserve(cubes.size());
  for (auto& mm : mats) {
    f.inverses_.push_back(mm->inverse().matrix());
    f.mats_.push_back(std::move(*mm));
  }
  std::ostringstream key;
  key << w.describe().dump() << "|p=" << std::setprecision(17) << p << "|w=" << window.n << ',' << window.j_min << ','
      << window.j_max << ',' << window.base.lo[0] << ',' << window.base.edge() << "|o=" << to_string(fixed.method)
      << ',' << fixed.directions << ',' << fixed.mvee_tol << ',' << fixed.quad.order << ',' << fixed.quad.min_cells
      << ',' << fixed.quad.grading_depth << ',' << fixed.quad.rel_tol;
  f.key_ = hex64(fnv1a(key.str()));
  return f;
}

std::shared_ptr<const ReducingFamily> ReducingFamily::cached(const MatrixWeight& w, double p,
                                                             const CubeWindow& window, const ReduceOptions& opt) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const ReducingFamily>> cache;
  std::ostringstream key;
  key << w.describe().dump() << "|p=" << std::setprecision(17) << p << "|w=" << window.n << ',' << window.j_min << ','
      << window.j_max << ',';
  for (int i = 0; i < window.n; ++i) key << window.base.lo[ax(i)] << ',';
  key << window.base.edge() << "|o=" << to_string(opt.method) << ',' << opt.directions << ',' << opt.mvee_tol << ','
      << opt.mvee_max_iter << ',' << opt.quad.order << ',' << opt.quad.min_cells << ',' << opt.quad.grading_depth << ','
      << opt.quad.rel_tol;
  const std::string k = hex64(fnv1a(key.str()));
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
  }
  auto fam = std::make_shared<const ReducingFamily>(build(w, p, window, opt));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(k, fam).first->second;
}

ReducingFamily ReducingFamily::identity(const CubeWindow& window, int m, double p) {
  ReducingFamily f;
  f.p_ = p;
  f.m_ = m;
  f.window_ = window;
  f.method_ = ReduceMethod::identity;
  std::size_t off = 0;
  for (int j = window.j_min; j <= window.j_max; ++j) {
    f.offsets_.push_back(off);
    off += window.count(j);
  }
  f.mats_.assign(off, PositiveMatrix::identity(m));
  f.inverses_.assign(off, Matrix::Identity(m, m));
  f.diag_.assign(off, CubeDiagnostics{});
  f.key_ = "identity";
  return f;
}

std::size_t ReducingFamily::slot(const DyadicCube& q) const {
  if (!window_.covers(q))
    throw CoverageError("reducing family does not cover a cube at level " + std::to_string(q.level));
  return offsets_[static_cast<std::size_t>(q.level - window_.j_min)] + window_.flat_index(q);
}

const PositiveMatrix& ReducingFamily::at(const DyadicCube& q) const { return mats_[slot(q)]; }
const Matrix& ReducingFamily::inverse_at(const DyadicCube& q) const { return inverses_[slot(q)]; }
const CubeDiagnostics& ReducingFamily::diagnostics(const DyadicCube& q) const { return diag_[slot(q)]; }

MatrixField ReducingFamily::level_field(int j) const {
  if (!covers_level(j)) throw CoverageError("reducing family does not cover level " + std::to_string(j));
  MatrixField out{j, window_, {}};
  const std::size_t off = offsets_[static_cast<std::size_t>(j - window_.j_min)];
  out.matrices.reserve(window_.count(j));
  for (std::size_t i = 0; i < window_.count(j); ++i) out.matrices.push_back(mats_[off + i].matrix());
  return out;
}

Bracket ReducingFamily::overall_bracket() const {
  Bracket b;
  bool first = true;
  for (const auto& d : diag_) {
    widen(b, d.check.vectors.lo, first);
    widen(b, d.check.vectors.hi, first);
  }
  return b;
}

Bracket ReducingFamily::overall_matrix_bracket() const {
  Bracket b;
  bool first = true;
  for (const auto& d : diag_) {
    widen(b, d.check.matrices.lo, first);
    widen(b, d.check.matrices.hi, first);
  }
  return b;
}

nlohmann::json ReducingFamily::to_json() const {
  nlohmann::json lo = nlohmann::json::array();
  for (int i = 0; i < window_.n; ++i) lo.push_back(window_.base.lo[ax(i)]);
  nlohmann::json cubes = nlohmann::json::array();
  const auto all = window_.all_cubes();
  for (std::size_t i = 0; i < all.size(); ++i) {
    nlohmann::json idx = nlohmann::json::array();
    for (int a = 0; a < window_.n; ++a) idx.push_back(all[i].index[ax(a)]);
    const auto& d = diag_[i];
    cubes.push_back({{"level", all[i].level},
                     {"index", idx},
                     {"a", matrix_json(mats_[i].matrix())},
                     {"bracket", {d.check.vectors.lo, d.check.vectors.hi}},
                     {"matrix_bracket", {d.check.matrices.lo, d.check.matrices.hi}},
                     {"iterations", d.iterations}});
  }
  return {{"format", "mwt-family"},
          {"version", 1},
          {"p", p_},
          {"m", m_},
          {"method", to_string(method_)},
          {"key", key_},
          {"window", {{"n", window_.n}, {"j_min", window_.j_min}, {"j_max", window_.j_max}, {"base", {{"lo", lo}, {"edge", window_.base.edge()}}}}},
          {"cubes", cubes}};
}

ReducingFamily ReducingFamily::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "mwt-family") throw FormatError("family: not an mwt-family document");
    ReducingFamily f;
    f.p_ = j.at("p").get<double>();
    f.m_ = j.at("m").get<int>();
    f.method_ = reduce_method_from_string(j.at("method").get<std::string>());
    f.key_ = j.at("key").get<std::string>();
    const auto& w = j.at("window");
    const int n = w.at("n").get<int>();
    Point lo{};
    const auto& jlo = w.at("base").at("lo");
    if (static_cast<int>(jlo.size()) != n) throw FormatError("family: base.lo has wrong length");
    for (int i = 0; i < n; ++i) lo[ax(i)] = jlo[ax(i)].get<double>();
    f.window_ = CubeWindow::make(n, w.at("j_min").get<int>(), w.at("j_max").get<int>(),
                                 Box::cube(n, lo, w.at("base").at("edge").get<double>()));
    std::size_t off = 0;
    for (int jj = f.window_.j_min; jj <= f.window_.j_max; ++jj) {
      f.offsets_.push_back(off);
      off += f.window_.count(jj);
    }
    const auto& cubes = j.at("cubes");
    if (cubes.size() != off) throw FormatError("family: cube count does not match the window");
    const auto all = f.window_.all_cubes();
    for (std::size_t i = 0; i < off; ++i) {
      const auto& c = cubes[i];
      if (c.at("level").get<int>() != all[i].level) throw FormatError("family: cubes out of order");
      for (int a = 0; a < n; ++a)
        if (c.at("index")[ax(a)].get<std::int64_t>() != all[i].index[ax(a)]) throw FormatError("family: cubes out of order");
      PositiveMatrix pm(HermitianMatrix(matrix_from_json(c.at("a"), f.m_), 1e-10));
      f.inverses_.push_back(pm.inverse().matrix());
      f.mats_.push_back(pm);
      CubeDiagnostics d;
      d.check.vectors = {c.at("bracket")[0].get<double>(), c.at("bracket")[1].get<double>()};
      d.check.matrices = {c.at("matrix_bracket")[0].get<double>(), c.at("matrix_bracket")[1].get<double>()};
      d.iterations = c.at("iterations").get<int>();
      f.diag_.push_back(d);
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("family: ") + e.what());
  }
}

void ReducingFamily::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os << to_json().dump(1) << '\n';
}

ReducingFamily ReducingFamily::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("family: ") + e.what());
  }
}

ProbeTable integrability_probe(const MatrixWeight& w, double p, const ReducingFamily& family,
                               const std::vector<double>& r_grid, const QuadratureSpec& quad) {
  const CubeWindow& win = family.window();
  const std::vector<DyadicCube> cubes = win.all_cubes();
  struct PerCube {
    std::vector<double> fwd, inv;
    std::vector<bool> bad;
    double sup_form = 0.0;
  };
  std::vector<PerCube> per(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t c) {
    const Box region = cube_box(cubes[c], win.base);
    const QuadratureRule rule = build_rule(region, w.singular_points(), quad);
    const Matrix& a = family.at(cubes[c]).matrix();
    const Matrix& ainv = family.inverse_at(cubes[c]);
    std::vector<double> nf(rule.size()), ni(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) {
      nf[k] = op_norm(a * w.power(rule.nodes[k], -1.0 / p));
      ni[k] = op_norm(w.power(rule.nodes[k], 1.0 / p) * ainv);
      per[c].sup_form = std::max(per[c].sup_form, nf[k]);
    }
    PerCube& pc = per[c];
    pc.fwd.assign(r_grid.size(), 0.0);
    pc.inv.assign(r_grid.size(), 0.0);
    pc.bad.assign(r_grid.size(), false);
    std::vector<double> v(rule.size());
    for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
      const double r = r_grid[ri];
      try {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(nf[k], r);
        pc.fwd[ri] = std::pow(average(rule, v, quad.rel_tol), 1.0 / r);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(ni[k], r);
        pc.inv[ri] = std::pow(average(rule, v, quad.rel_tol), 1.0 / r);
      } catch (const IntegrabilityError&) {
        pc.bad[ri] = true;
      }
    }
  });
  ProbeTable t;
  for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
    ProbeRow row;
    row.r = r_grid[ri];
    for (const auto& pc : per) {
      row.divergent = row.divergent || pc.bad[ri];
      row.forward = std::max(row.forward, pc.fwd[ri]);
      row.inverse = std::max(row.inverse, pc.inv[ri]);
    }
    if (row.divergent) row.forward = row.inverse = std::numeric_limits<double>::infinity();
    else t.stable_r = std::max(t.stable_r, row.r);
    t.rows.push_back(row);
  }
  for (const auto& pc : per) t.sup_form = std::max(t.sup_form, pc.sup_form);
  return t;
}

}  // namespace mwt
