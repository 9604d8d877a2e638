#pragma once

// Reducing operators: one positive-definite A_Q per cube with
// |A_Q z| ~ rho_Q(z) := (avg_Q |W^{1/p}(x) z|^p)^{1/p}.
//
// For p = 2 the unit ball of rho_Q is the ellipsoid of (avg_Q W)^{1/2}, so
// that operator is exact. For other p we fit the minimum-volume ellipsoid
// containing the boundary samples z_k / rho_Q(z_k).

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/dyadic.hpp"
#include "mwt/linalg.hpp"
#include "mwt/quadrature.hpp"
#include "mwt/weights.hpp"

namespace mwt {

// automatic picks exact_scalar for scalar weights (rho_Q(z) = (avg_Q w)^{1/p}|z|),
// exact_p2 for p = 2 and mvee otherwise.
enum class ReduceMethod { automatic, exact_scalar, exact_p2, mvee, identity };

std::string to_string(ReduceMethod m);
ReduceMethod reduce_method_from_string(const std::string& s);

struct ReduceOptions {
  ReduceMethod method = ReduceMethod::automatic;
  int directions = 256;         // K fitting directions on the realified sphere
  int verify_directions = 64;   // extra directions used for the bracket
  double mvee_tol = 1e-4;
  int mvee_max_iter = 50000;
  QuadratureSpec quad;
};

/// Quasi-uniform unit vectors in C^m (as points of the realified sphere S^{2m-1}).
std::vector<Vector> sphere_directions(int m, int count);

/// rho_Q(z) = (avg_Q |W^{1/p}(x) z|^p)^{1/p}.
double cube_norm(const MatrixWeight& w, double p, const Box& region, const Vector& z, const QuadratureSpec& quad);

/// Precomputed W^{1/p} at the quadrature nodes of one region; evaluates rho
/// for many directions without rebuilding the rule.
class CubeNorm {
 public:
  CubeNorm(const MatrixWeight& w, double p, const Box& region, const QuadratureSpec& quad);
  double operator()(const Vector& z) const;
  /// (avg_Q ||W^{1/p}(x) M||^p)^{1/p}
  double matrix_norm(const Matrix& m) const;
  /// avg_Q W^{2/p}, the exact p = 2 Gram matrix (any p gives a positive matrix).
  Matrix average_power() const;
  double order() const { return p_; }

 private:
  double p_;
  double rel_tol_;
  QuadratureRule rule_;
  bool scalar_;
  std::vector<double> scalar_w_;   // w(x) at nodes (scalar weights)
  std::vector<Matrix> root_;       // W^{1/p}(x) at nodes (matrix weights)
};

struct MveeResult {
  Matrix h;  // ellipsoid {z : z* h z <= 1}
  int iterations = 0;
};

/// Minimum-volume origin-centred ellipsoid containing the points and their
/// complex phase orbits. Solved as a Hermitian problem in C^m: a real
/// ellipsoid in R^{2m} invariant under multiplication by e^{i pi/4} (the
/// 8-phase symmetrization) is necessarily a complex Hermitian form, so this
/// is the realified 8-phase MVEE. Khachiyan iteration with Todd-Yildirim
/// away steps; throws FitError without convergence.
MveeResult mvee(const std::vector<Vector>& points, double tol, int max_iter);

struct ReduceResult {
  PositiveMatrix a;
  ReduceMethod method;
  int iterations = 0;
};

ReduceResult reduce(const MatrixWeight& w, double p, const Box& region, const ReduceOptions& opt);
/// Reducing operator of order p' for the dual weight W^{-1/(p-1)}.
ReduceResult dual_reduce(const MatrixWeight& w, double p, const Box& region, const ReduceOptions& opt);

struct Bracket {
  double lo = 1.0;
  double hi = 1.0;
  bool contains_one(double tol = 1e-6) const { return lo <= 1.0 + tol && hi >= 1.0 - tol; }
  double width() const { return hi / lo; }
};

struct ReducingCheck {
  Bracket vectors;   // |A z| / rho_Q(z) over sampled directions
  Bracket matrices;  // ||A M|| / (avg ||W^{1/p} M||^p)^{1/p} over test matrices
};

/// Brackets of |Az|/rho_Q(z) over `directions` fitting directions plus
/// seeded extra ones, and of the matrix form over a Hermitian basis.
ReducingCheck verify_reducing(const PositiveMatrix& a, const MatrixWeight& w, double p, const Box& region,
                              int directions, const QuadratureSpec& quad);
ReducingCheck verify_reducing(const PositiveMatrix& a, const CubeNorm& rho, int m, int directions);

struct CubeDiagnostics {
  ReducingCheck check;
  int iterations = 0;
};

class ReducingFamily {
 public:
  static ReducingFamily build(const MatrixWeight& w, double p, const CubeWindow& window, const ReduceOptions& opt);
  /// Cached build keyed by a content hash of (weight, p, window, options).
  static std::shared_ptr<const ReducingFamily> cached(const MatrixWeight& w, double p, const CubeWindow& window,
                                                      const ReduceOptions& opt);
  static ReducingFamily identity(const CubeWindow& window, int m, double p);

  double order() const { return p_; }
  int matrix_dim() const { return m_; }
  const CubeWindow& window() const { return window_; }
  ReduceMethod method() const { return method_; }
  const std::string& key() const { return key_; }

  bool covers(const DyadicCube& q) const { return window_.covers(q); }
  /// Throws CoverageError for cubes outside the window.
  const PositiveMatrix& at(const DyadicCube& q) const;
  const Matrix& inverse_at(const DyadicCube& q) const;
  const CubeDiagnostics& diagnostics(const DyadicCube& q) const;
  bool covers_level(int j) const { return j >= window_.j_min && j <= window_.j_max; }
  MatrixField level_field(int j) const;

  /// Union of all per-cube vector brackets.
  Bracket overall_bracket() const;
  Bracket overall_matrix_bracket() const;

  nlohmann::json to_json() const;
  static ReducingFamily from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static ReducingFamily load(const std::filesystem::path& path);

 private:
  std::size_t slot(const DyadicCube& q) const;

  double p_ = 2.0;
  int m_ = 1;
  CubeWindow window_;
  ReduceMethod method_ = ReduceMethod::identity;
  std::string key_;
  std::vector<std::size_t> offsets_;
  std::vector<PositiveMatrix> mats_;
  std::vector<Matrix> inverses_;
  std::vector<CubeDiagnostics> diag_;
};

struct ProbeRow {
  double r = 1.0;
  double forward = 0.0;  // sup_Q (avg_Q ||A_Q W^{-1/p}||^r)^{1/r}
  double inverse = 0.0;  // sup_Q (avg_Q ||W^{1/p} A_Q^{-1}||^r)^{1/r}
  bool divergent = false;
};

struct ProbeTable {
  std::vector<ProbeRow> rows;
  /// p <= 1: sup_Q max_{x in nodes of Q} ||A_Q W^{-1/p}(x)||.
  double sup_form = 0.0;
  double stable_r = 0.0;  // largest r with a finite row
};

ProbeTable integrability_probe(const MatrixWeight& w, double p, const ReducingFamily& family,
                               const std::vector<double>& r_grid, const QuadratureSpec& quad);

}  // namespace mwt
