#include "mwt/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mwt/errors.hpp"
#include "mwt/parallel.hpp"

namespace mwt {

namespace {

std::size_t ax(int i) { return static_cast<std::size_t>(i); }

nlohmann::json point_json(const Point& x, int n) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < n; ++i) a.push_back(x[ax(i)]);
  return a;
}

nlohmann::json profile_json(const ScalarProfile& pr, int n) {
  nlohmann::json f = nlohmann::json::array();
  for (const auto& [at, e] : pr.factors) f.push_back({{"at", point_json(at, n)}, {"exponent", e}});
  return {{"scale", pr.scale}, {"factors", f}, {"log_exponent", pr.log_exponent}};
}

Matrix spectral_power(const EigenSystem& es, double alpha) {
  RealVector v(es.values.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::pow(es.values(i), alpha);
  return es.vectors * v.cast<cplx>().asDiagonal() * es.vectors.adjoint();
}

void check_p(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgumentError("exponent p must be a positive finite number");
}

}  // namespace

double ScalarProfile::operator()(const Point& x, int n) const {
  double v = scale;
  for (const auto& [at, e] : factors)
    if (e != 0.0) v *= std::pow(distance(x, at, n), e);
  if (log_exponent != 0.0) v *= std::pow(std::log(2.0 + norm(x, n)), log_exponent);
  return v;
}

ScalarProfile ScalarProfile::pow(double alpha) const {
  ScalarProfile out = *this;
  out.scale = std::pow(scale, alpha);
  for (auto& f : out.factors) f.second *= alpha;
  out.log_exponent *= alpha;
  return out;
}

bool ScalarProfile::is_constant() const {
  if (log_exponent != 0.0) return false;
  return std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.second == 0.0; });
}

std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::power_log: return "power_log";
    case WeightKind::two_singularity: return "two_singularity";
    case WeightKind::conjugated_block: return "conjugated_block";
    case WeightKind::grid_sampled: return "grid_sampled";
    case WeightKind::constant: return "constant";
  }
  return "unknown";
}

Box default_domain(int n) { return Box::centered(n, Point{}, 1.0); }

MatrixWeight MatrixWeight::identity(int n, int m) { return constant(n, PositiveMatrix::identity(m)); }

MatrixWeight MatrixWeight::constant(int n, const PositiveMatrix& value) {
  MatrixWeight w;
  w.kind_ = WeightKind::constant;
  w.n_ = n;
  w.m_ = value.dim();
  w.domain_ = default_domain(n);
  w.constant_ = eigensystem(value.hermitian());
  return w;
}

MatrixWeight MatrixWeight::power_log(int n, int m, double a, double b, double scale) {
  if (n < 1 || n > kMaxSpaceDim) throw InvalidArgumentError("space dimension must be 1..3");
  if (m < 1 || m > kMaxMatrixDim) throw InvalidArgumentError("matrix dimension must be 1..4");
  if (!(a > -n)) throw IntegrabilityError("power weight |x|^a needs a > -n to be locally integrable");
  if (!(scale > 0.0)) throw InvalidArgumentError("weight scale must be positive");
  MatrixWeight w;
  w.kind_ = WeightKind::power_log;
  w.n_ = n;
  w.m_ = m;
  w.domain_ = default_domain(n);
  w.profile_.scale = scale;
  w.profile_.factors.push_back({Point{}, a});
  w.profile_.log_exponent = b;
  if (a != 0.0) w.singular_.push_back(Point{});
  return w;
}

MatrixWeight MatrixWeight::two_singularity(int n, int m, double d, double dtilde, double p, const Point& x0) {
  if (n < 1 || n > kMaxSpaceDim) throw InvalidArgumentError("space dimension must be 1..3");
  if (m < 1 || m > kMaxMatrixDim) throw InvalidArgumentError("matrix dimension must be 1..4");
  if (!(d >= 0.0 && d < n) || !(dtilde >= 0.0 && dtilde < n))
    throw InvalidArgumentError("two-singularity weight needs d, dtilde in [0, n)");
  if (!(p > 1.0)) throw InvalidArgumentError("two-singularity weight needs p > 1");
  if (norm(x0, n) == 0.0) throw InvalidArgumentError("second singular point must differ from the origin");
  MatrixWeight w;
  w.kind_ = WeightKind::two_singularity;
  w.n_ = n;
  w.m_ = m;
  w.domain_ = default_domain(n);
  w.profile_.factors.push_back({Point{}, -d});
  w.profile_.factors.push_back({x0, (p - 1.0) * dtilde});
  if (d != 0.0) w.singular_.push_back(Point{});
  if (dtilde != 0.0) w.singular_.push_back(x0);
  return w;
}

MatrixWeight MatrixWeight::conjugated_block(int n, double a1, double a2, double angle_rate) {
  if (n < 1 || n > kMaxSpaceDim) throw InvalidArgumentError("space dimension must be 1..3");
  if (!(a1 > -n) || !(a2 > -n)) throw IntegrabilityError("block exponents need a_i > -n");
  MatrixWeight w;
  w.kind_ = WeightKind::conjugated_block;
  w.n_ = n;
  w.m_ = 2;
  w.domain_ = default_domain(n);
  w.block_[0].factors.push_back({Point{}, a1});
  w.block_[1].factors.push_back({Point{}, a2});
  w.angle_rate_ = angle_rate;
  if (a1 != 0.0 || a2 != 0.0) w.singular_.push_back(Point{});
  return w;
}

MatrixWeight MatrixWeight::grid_sampled(WeightSamples samples) {
  const Grid& g = samples.grid;
  if (g.n < 1 || g.n > kMaxSpaceDim) throw InvalidArgumentError("space dimension must be 1..3");
  if (samples.m < 1 || samples.m > kMaxMatrixDim) throw InvalidArgumentError("matrix dimension must be 1..4");
  if (samples.matrices.size() != g.size()) throw FormatError("sample count does not match the grid");
  auto eig = std::make_shared<std::vector<EigenSystem>>();
  eig->reserve(samples.matrices.size());
  std::uint64_t h = fnv1a("grid_sampled");
  for (const Matrix& s : samples.matrices) {
    if (s.rows() != samples.m || s.cols() != samples.m) throw FormatError("sample matrix has the wrong size");
    const PositiveMatrix pm{HermitianMatrix(s, 1e-10)};
    eig->push_back(eigensystem(pm.hermitian()));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double parts[2] = {s.data()[i].real(), s.data()[i].imag()};
      h = fnv1a({reinterpret_cast<const char*>(parts), sizeof(parts)}, h);
    }
  }
  MatrixWeight w;
  w.kind_ = WeightKind::grid_sampled;
  w.n_ = g.n;
  w.m_ = samples.m;
  w.domain_ = g.domain;
  w.samples_hash_ = h;
  w.samples_ = std::make_shared<const WeightSamples>(std::move(samples));
  w.sample_eigen_ = std::move(eig);
  return w;
}

MatrixWeight MatrixWeight::with_domain(const Box& domain) const {
  if (domain.n != n_ || !domain.is_cube()) throw InvalidArgumentError("weight domain must be an n-cube");
  MatrixWeight w = *this;
  w.domain_ = domain;
  return w;
}

void MatrixWeight::check_point(const Point& x) const {
  for (const Point& s : singular_)
    if (distance(x, s, n_) == 0.0) throw SingularityError("matrix weight evaluated at a singular point");
}

bool MatrixWeight::is_scalar() const {
  if (m_ == 1) return true;
  switch (kind_) {
    case WeightKind::power_log:
    case WeightKind::two_singularity: return true;
    case WeightKind::constant: {
      const RealVector& v = constant_->values;
      return v.maxCoeff() - v.minCoeff() <= 1e-14 * v.maxCoeff();
    }
    default: return false;
  }
}

double MatrixWeight::scalar_power(const Point& x, double alpha) const {
  if (kind_ == WeightKind::power_log || kind_ == WeightKind::two_singularity) {
    check_point(x);
    return std::pow(profile_(x, n_), alpha);
  }
  if (kind_ == WeightKind::constant && is_scalar()) return std::pow(constant_->values(0), alpha);
  if (m_ != 1) throw InvalidArgumentError("scalar_power called on a non-scalar matrix weight");
  return power(x, alpha)(0, 0).real();
}

Matrix MatrixWeight::power(const Point& x, double alpha) const {
  switch (kind_) {
    case WeightKind::constant: return spectral_power(*constant_, alpha);
    case WeightKind::power_log:
    case WeightKind::two_singularity: {
      check_point(x);
      const double s = std::pow(profile_(x, n_), alpha);
      return Matrix::Identity(m_, m_) * cplx(s, 0.0);
    }
    case WeightKind::conjugated_block: {
      check_point(x);
      const double w1 = std::pow(block_[0](x, n_), alpha);
      const double w2 = std::pow(block_[1](x, n_), alpha);
      const double th = angle_rate_ * x[0];
      const double c = std::cos(th), s = std::sin(th);
      Matrix out(2, 2);
      out(0, 0) = c * c * w1 + s * s * w2;
      out(1, 1) = s * s * w1 + c * c * w2;
      out(0, 1) = out(1, 0) = c * s * (w1 - w2);
      return out;
    }
    case WeightKind::grid_sampled: {
      const Grid& g = samples_->grid;
      std::array<std::size_t, kMaxSpaceDim> idx{};
      const double h = g.spacing();
      const auto last = static_cast<std::int64_t>(g.per_axis()) - 1;
      for (int i = 0; i < n_; ++i) {
        const auto k = static_cast<std::int64_t>(std::floor((x[ax(i)] - g.domain.lo[ax(i)]) / h));
        idx[ax(i)] = static_cast<std::size_t>(std::clamp<std::int64_t>(k, 0, last));
      }
      const EigenSystem& es = (*sample_eigen_)[g.flatten(idx)];
      return spectral_power(es, sample_power_ * alpha) * cplx(std::pow(sample_factor_, alpha), 0.0);
    }
  }
  throw InvalidArgumentError("unknown weight kind");
}

PositiveMatrix MatrixWeight::evaluate(const Point& x) const {
  if (is_scalar() && m_ > 1) return PositiveMatrix::scalar(m_, scalar_power(x, 1.0));
  return PositiveMatrix(HermitianMatrix(power(x, 1.0), 1e-10));
}

MatrixWeight MatrixWeight::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidArgumentError("weight scale factor must be positive");
  MatrixWeight w = *this;
  switch (kind_) {
    case WeightKind::constant: w.constant_->values *= c; break;
    case WeightKind::power_log:
    case WeightKind::two_singularity: w.profile_.scale *= c; break;
    case WeightKind::conjugated_block:
      w.block_[0].scale *= c;
      w.block_[1].scale *= c;
      break;
    case WeightKind::grid_sampled: w.sample_factor_ *= c; break;
  }
  return w;
}

MatrixWeight MatrixWeight::dual(double p) const {
  if (!(p > 1.0)) throw InvalidArgumentError("dual weight needs p > 1");
  const double alpha = -1.0 / (p - 1.0);
  MatrixWeight w = *this;
  switch (kind_) {
    case WeightKind::constant:
      for (Eigen::Index i = 0; i < w.constant_->values.size(); ++i)
        w.constant_->values(i) = std::pow(constant_->values(i), alpha);
      break;
    case WeightKind::power_log:
    case WeightKind::two_singularity: w.profile_ = profile_.pow(alpha); break;
    case WeightKind::conjugated_block:
      w.block_[0] = block_[0].pow(alpha);
      w.block_[1] = block_[1].pow(alpha);
      break;
    case WeightKind::grid_sampled:
      w.sample_factor_ = std::pow(sample_factor_, alpha);
      w.sample_power_ = sample_power_ * alpha;
      break;
  }
  return w;
}

nlohmann::json MatrixWeight::describe() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  j["n"] = n_;
  j["m"] = m_;
  j["domain"] = {{"lo", point_json(domain_.lo, n_)}, {"edge", domain_.edge()}};
  switch (kind_) {
    case WeightKind::constant: {
      nlohmann::json ev = nlohmann::json::array();
      for (Eigen::Index i = 0; i < constant_->values.size(); ++i) ev.push_back(constant_->values(i));
      j["eigenvalues"] = ev;
      nlohmann::json vecs = nlohmann::json::array();
      for (Eigen::Index r = 0; r < constant_->vectors.rows(); ++r)
        for (Eigen::Index c = 0; c < constant_->vectors.cols(); ++c)
          vecs.push_back({constant_->vectors(r, c).real(), constant_->vectors(r, c).imag()});
      j["eigenvectors"] = vecs;
      break;
    }
    case WeightKind::power_log:
    case WeightKind::two_singularity: j["profile"] = profile_json(profile_, n_); break;
    case WeightKind::conjugated_block:
      j["blocks"] = {profile_json(block_[0], n_), profile_json(block_[1], n_)};
      j["angle_rate"] = angle_rate_;
      break;
    case WeightKind::grid_sampled:
      j["bits"] = samples_->grid.bits;
      j["samples_hash"] = samples_hash_;
      j["power"] = sample_power_;
      j["factor"] = sample_factor_;
      break;
  }
  return j;
}

std::optional<std::array<double, 3>> MatrixWeight::power_log_params() const {
  if (kind_ != WeightKind::power_log || profile_.factors.size() != 1) return std::nullopt;
  return std::array<double, 3>{profile_.factors[0].second, profile_.log_exponent, profile_.scale};
}

double cube_average_matrix_norm(const MatrixWeight& w, double p, const Box& region, const Matrix& m,
                                const QuadratureSpec& quad) {
  check_p(p);
  const QuadratureRule rule = build_rule(region, w.singular_points(), quad);
  std::vector<double> vals(rule.size());
  if (w.is_scalar()) {
    const double mn = std::pow(op_norm(m), p);
    for (std::size_t k = 0; k < rule.size(); ++k) vals[k] = w.scalar_power(rule.nodes[k], 1.0) * mn;
  } else {
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const Matrix a = w.power(rule.nodes[k], 1.0 / p) * m;
      vals[k] = std::pow(op_norm(a), p);
    }
  }
  return std::pow(average(rule, vals, quad.rel_tol), 1.0 / p);
}

double cross_average(const MatrixWeight& w, double p, const Box& x_region, const Box& y_region, ApVariant variant,
                     const QuadratureSpec& quad) {
  check_p(p);
  if (variant == ApVariant::star && p > 1.0)
    throw InvalidArgumentError("the star A_p variant is defined only for p <= 1");
  const QuadratureRule rx = build_rule(x_region, w.singular_points(), quad);
  const QuadratureRule ry = build_rule(y_region, w.singular_points(), quad);

  if (w.is_scalar()) {
    // ||W^{1/p}(x) W^{-1/p}(y)|| = w(x)^{1/p} w(y)^{-1/p}: the double average factorizes
    // and both p <= 1 variants coincide.
    std::vector<double> vx(rx.size());
    for (std::size_t k = 0; k < rx.size(); ++k) vx[k] = w.scalar_power(rx.nodes[k], 1.0);
    const double ax = average(rx, vx, quad.rel_tol);
    if (p > 1.0) {
      const double pp = p / (p - 1.0);
      std::vector<double> vy(ry.size());
      for (std::size_t k = 0; k < ry.size(); ++k) vy[k] = w.scalar_power(ry.nodes[k], -pp / p);
      return ax * std::pow(average(ry, vy, quad.rel_tol), p / pp);
    }
    double my = 0.0;
    for (const Point& y : ry.nodes) my = std::max(my, w.scalar_power(y, -1.0));
    return ax * my;
  }

  std::vector<Matrix> wx(rx.size()), wy(ry.size());
  for (std::size_t k = 0; k < rx.size(); ++k) wx[k] = w.power(rx.nodes[k], 1.0 / p);
  for (std::size_t k = 0; k < ry.size(); ++k) wy[k] = w.power(ry.nodes[k], -1.0 / p);

  if (p > 1.0) {
    const double pp = p / (p - 1.0);
    std::vector<double> outer(rx.size());
    parallel_for(rx.size(), [&](std::size_t k) {
      std::vector<double> inner(ry.size());
      for (std::size_t l = 0; l < ry.size(); ++l) inner[l] = std::pow(op_norm(wx[k] * wy[l]), pp);
      outer[k] = std::pow(average(ry, inner, quad.rel_tol), p / pp);
    });
    return average(rx, outer, quad.rel_tol);
  }
  if (variant == ApVariant::standard) {
    std::vector<double> per_y(ry.size());
    parallel_for(ry.size(), [&](std::size_t l) {
      std::vector<double> inner(rx.size());
      for (std::size_t k = 0; k < rx.size(); ++k) inner[k] = std::pow(op_norm(wx[k] * wy[l]), p);
      per_y[l] = average(rx, inner, quad.rel_tol);
    });
    return *std::max_element(per_y.begin(), per_y.end());
  }
  std::vector<double> per_x(rx.size());
  parallel_for(rx.size(), [&](std::size_t k) {
    double mx = 0.0;
    for (std::size_t l = 0; l < ry.size(); ++l) mx = std::max(mx, std::pow(op_norm(wx[k] * wy[l]), p));
    per_x[k] = mx;
  });
  return average(rx, per_x, quad.rel_tol);
}

ApCharacteristic ap_constant(const MatrixWeight& w, double p, const CubeWindow& window, ApVariant variant,
                             const QuadratureSpec& quad) {
  check_p(p);
  if (variant == ApVariant::star && p > 1.0)
    throw InvalidArgumentError("the star A_p variant is defined only for p <= 1");
  const std::vector<DyadicCube> cubes = window.all_cubes();
  std::vector<double> vals(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t i) {
    const Box q = cube_box(cubes[i], window.base);
    vals[i] = cross_average(w, p, q, q, variant, quad);
  });
  ApCharacteristic out;
  out.p = p;
  out.variant = variant;
  out.cubes = cubes.size();
  out.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cubes.size(); ++i)
    if (vals[i] > out.value) {
      out.value = vals[i];
      out.argmax = cubes[i];
    }
  out.cube_set = "dyadic levels " + std::to_string(window.j_min) + ".." + std::to_string(window.j_max) + " (" +
                 std::to_string(cubes.size()) + " cubes)";
  return out;
}

MatrixWeight dual_weight(const MatrixWeight& w, double p) {
  if (!(p > 1.0)) throw InvalidArgumentError("dual weight needs p > 1");
  return w.dual(p);
}

BallAverage analytic_ball_average(double a, double b, const Point& x0, double r, int n, const QuadratureSpec& quad) {
  if (!(a > -n)) throw IntegrabilityError("|x|^a is not locally integrable for a <= -n");
  if (!(r > 0.0)) throw InvalidArgumentError("ball radius must be positive");
  auto f = [a, b](double t) {
    double v = a != 0.0 ? std::pow(t, a) : 1.0;
    if (b != 0.0) v *= std::pow(std::log(2.0 + t), b);
    return v;
  };
  BallAverage out;
  const double c = norm(x0, n);
  if (n == 1) {
    Box seg;
    seg.n = 1;
    seg.lo[0] = x0[0] - r;
    seg.hi[0] = x0[0] + r;
    const Point origin{};
    const QuadratureRule rule = build_rule(seg, std::span<const Point>(&origin, 1), quad);
    std::vector<double> vals(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) vals[k] = f(std::abs(rule.nodes[k][0]));
    out.value = average(rule, vals, quad.rel_tol);
  } else if (n == 2) {
    // Integrate the radial profile against the length of the circle |x| = t
    // inside the disk; the angular fraction is closed form.
    const double lo = std::max(0.0, c - r), hi = c + r;
    Box seg;
    seg.n = 1;
    seg.lo[0] = lo;
    seg.hi[0] = hi;
    std::vector<Point> breaks;
    for (double t : {0.0, std::abs(r - c)})
      if (t >= lo && t <= hi) breaks.push_back(Point{t, 0.0, 0.0});
    const QuadratureRule rule = build_rule(seg, breaks, quad);
    std::vector<double> vals(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double t = rule.nodes[k][0];
      double angle;
      if (t <= r - c) angle = 2.0 * std::numbers::pi;
      else {
        const double cosv = std::clamp((t * t + c * c - r * r) / (2.0 * t * c), -1.0, 1.0);
        angle = 2.0 * std::acos(cosv);
      }
      vals[k] = f(t) * t * angle;
    }
    out.value = integrate(rule, vals, quad.rel_tol).value / (std::numbers::pi * r * r);
  } else {
    throw InvalidArgumentError("analytic_ball_average supports n = 1 and n = 2");
  }
  out.envelope = std::pow(c + r, a) * std::pow(std::log(2.0 + c + r), b);
  out.ratio = out.value / out.envelope;
  return out;
}

}  // namespace mwt
