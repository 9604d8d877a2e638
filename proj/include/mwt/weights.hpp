#pragma once

// Matrix weights x -> W(x), their cube averages, A_p characteristics and duals.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mwt/dyadic.hpp"
#include "mwt/linalg.hpp"
#include "mwt/quadrature.hpp"

namespace mwt {

/// c * prod_i |x - s_i|^{e_i} * [log(2 + |x|)]^b
struct ScalarProfile {
  double scale = 1.0;
  std::vector<std::pair<Point, double>> factors;
  double log_exponent = 0.0;

  double operator()(const Point& x, int n) const;
  /// The profile raised to the power alpha (exponents multiply).
  ScalarProfile pow(double alpha) const;
  bool is_constant() const;
};

enum class WeightKind { power_log, two_singularity, conjugated_block, grid_sampled, constant };

std::string to_string(WeightKind k);

/// Samples of an m x m positive-definite field on a uniform grid; W is taken
/// piecewise constant on grid cells.
struct WeightSamples {
  Grid grid;
  int m = 1;
  std::vector<Matrix> matrices;  // one per grid node
};

class MatrixWeight {
 public:
  static MatrixWeight identity(int n, int m);
  static MatrixWeight constant(int n, const PositiveMatrix& value);
  /// c |x|^a [log(2 + |x|)]^b I_m; requires a > -n.
  static MatrixWeight power_log(int n, int m, double a, double b, double scale = 1.0);
  /// |x|^{-d} |x - x0|^{(p-1) dtilde} I_m with d, dtilde in [0, n).
  static MatrixWeight two_singularity(int n, int m, double d, double dtilde, double p, const Point& x0);
  /// U(x) diag(w1(x), w2(x)) U(x)^T with w_i = |x|^{a_i} and U(x) the plane
  /// rotation by angle_rate * x_1. Genuinely non-commuting for m = 2.
  static MatrixWeight conjugated_block(int n, double a1, double a2, double angle_rate);
  static MatrixWeight grid_sampled(WeightSamples samples);

  int space_dim() const { return n_; }
  int matrix_dim() const { return m_; }
  WeightKind kind() const { return kind_; }
  const Box& domain() const { return domain_; }
  /// Returns a copy living on another working domain (must be an n-cube).
  MatrixWeight with_domain(const Box& domain) const;
  std::span<const Point> singular_points() const { return singular_; }

  /// Throws SingularityError at a singular point.
  PositiveMatrix evaluate(const Point& x) const;
  /// W(x)^alpha.
  Matrix power(const Point& x, double alpha) const;
  /// True when W = w I_m for a scalar w.
  bool is_scalar() const;
  /// w(x)^alpha for scalar weights.
  double scalar_power(const Point& x, double alpha) const;

  MatrixWeight scaled(double c) const;
  /// W^{-1/(p-1)}, computed analytically for the analytic kinds.
  MatrixWeight dual(double p) const;

  /// Canonical description; stable across runs and used as a cache key.
  nlohmann::json describe() const;
  /// Analytic parameters when the weight is PowerLog: (a, b, c).
  std::optional<std::array<double, 3>> power_log_params() const;

 private:
  MatrixWeight() = default;
  void check_point(const Point& x) const;

  WeightKind kind_ = WeightKind::constant;
  int n_ = 1;
  int m_ = 1;
  Box domain_;
  std::vector<Point> singular_;
  // power_log / two_singularity: W = profile * I
  ScalarProfile profile_;
  // conjugated_block
  ScalarProfile block_[2];
  double angle_rate_ = 0.0;
  // constant
  std::optional<EigenSystem> constant_;
  // grid_sampled: W(x) = factor * S(x)^power with S the stored sample
  std::shared_ptr<const WeightSamples> samples_;
  std::shared_ptr<const std::vector<EigenSystem>> sample_eigen_;
  std::uint64_t samples_hash_ = 0;
  double sample_power_ = 1.0;
  double sample_factor_ = 1.0;
};

/// Default working domain [-1/2, 1/2)^n.
Box default_domain(int n);

/// (avg_Q || W^{1/p}(x) M ||^p)^{1/p}
double cube_average_matrix_norm(const MatrixWeight& w, double p, const Box& region, const Matrix& m,
                                const QuadratureSpec& quad);

enum class ApVariant { standard, star };

/// The two-cube A_p quantity: for p > 1,
///   avg_{x in X} [ avg_{y in Y} ||W^{1/p}(x) W^{-1/p}(y)||^{p'} ]^{p/p'},
/// and for p <= 1 either max_{y in Y} avg_{x in X} ||.||^p (standard) or
/// avg_{x in X} max_{y in Y} ||.||^p (star). The y-maximum runs over the
/// quadrature nodes of Y, which under-estimates the essential supremum.
double cross_average(const MatrixWeight& w, double p, const Box& x_region, const Box& y_region,
                     ApVariant variant, const QuadratureSpec& quad);

struct ApCharacteristic {
  double p = 2.0;
  double value = 1.0;
  ApVariant variant = ApVariant::standard;
  std::string cube_set;    // human-readable description of the cubes searched
  DyadicCube argmax;       // cube attaining the supremum
  std::size_t cubes = 0;
};

/// Supremum over every cube of the window of the defining A_p quantity.
/// Throws InvalidArgumentError for the star variant with p > 1.
ApCharacteristic ap_constant(const MatrixWeight& w, double p, const CubeWindow& window, ApVariant variant,
                             const QuadratureSpec& quad);

/// W^{-1/(p-1)}; throws InvalidArgumentError for p <= 1.
MatrixWeight dual_weight(const MatrixWeight& w, double p);

struct BallAverage {
  double value = 0.0;     // avg over B(x0, r) of |x|^a log(2+|x|)^b
  double envelope = 0.0;  // (|x0| + r)^a log(2 + |x0| + r)^b
  double ratio = 0.0;
};

/// Supports n = 1 (intervals) and n = 2 (disks, via polar coordinates about
/// the origin). Throws IntegrabilityError when a <= -n.
BallAverage analytic_ball_average(double a, double b, const Point& x0, double r, int n,
                                  const QuadratureSpec& quad = {});

}  // namespace mwt
