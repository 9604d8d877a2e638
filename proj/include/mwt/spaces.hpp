#pragma once

// Besov-type and Triebel-Lizorkin-type norms over a finite cube window:
// the L A^tau_{p,q} engine, sequence norms under the three weightings, the
// p = infinity Triebel-Lizorkin norm, maximal sequences and identity checks.
//
// Levels are scaled by l(Q)^{-s}, which is 2^{js} on the unit base box.

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/dyadic.hpp"
#include "mwt/reducing.hpp"
#include "mwt/weights.hpp"

namespace mwt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SpaceKind { B, F };

struct SpaceParams {
  double s = 0.0;
  double tau = 0.0;
  double p = 2.0;  // kInf marks the p = infinity scale
  double q = 2.0;  // kInf allowed
  SpaceKind kind = SpaceKind::B;

  /// Throws InvalidArgumentError on tau < 0, p or q not in (0, inf].
  void validate() const;
};

enum class Criticality { subcritical, critical, supercritical };

std::string to_string(SpaceKind k);
std::string to_string(Criticality c);
Criticality classify(const SpaceParams& params);

/// {t_Q}: one complex m-vector per window cube, in CubeWindow::all_cubes order.
struct CoefficientField {
  CubeWindow window;
  int m = 1;
  std::vector<cplx> values;

  static CoefficientField zeros(const CubeWindow& window, int m);
  std::size_t offset(const DyadicCube& q) const;
  std::span<cplx> at(const DyadicCube& q) { return {values.data() + offset(q), static_cast<std::size_t>(m)}; }
  std::span<const cplx> at(const DyadicCube& q) const {
    return {values.data() + offset(q), static_cast<std::size_t>(m)};
  }
};

/// Keys are "(j,k_1,...,k_n)"; values are lists of [re, im] pairs.
nlohmann::json to_json(const CoefficientField& t);
CoefficientField coefficient_field_from_json(const nlohmann::json& j);
void save(const CoefficientField& t, const std::filesystem::path& path);
CoefficientField load_coefficient_field(const std::filesystem::path& path);

/// One nonnegative scalar field f_j, piecewise constant on the 2^{res n}
/// cells of the base box (row-major, axis 0 slowest).
struct LevelField {
  int level = 0;
  int res = 0;
  std::vector<double> values;
};

struct LevelFamily {
  int n = 1;
  Box base = Box::unit(1);
  std::vector<LevelField> levels;
};

struct NormResult {
  double value = 0.0;
  DyadicCube argmax;  // cube P attaining the supremum
};

/// sup over window cubes P of |P|^{-tau} ||{f_j}||_{L A_{pq}(P-hat)}, with
/// P-hat = P x {j >= j_P}. F-kind with p = infinity is rejected; use finfty_norm.
NormResult la_tau_norm(const LevelFamily& f, const SpaceParams& params, const CubeWindow& p_window);

/// sup_P [avg_P sum_{j >= j_P} |f_j|^q]^{1/q}; q = infinity gives sup_j ||f_j||_inf.
NormResult finfty_norm(const LevelFamily& f, double q, const CubeWindow& p_window);

enum class WeightingKind { unweighted, weight, family };

struct Weighting {
  WeightingKind kind = WeightingKind::unweighted;
  const MatrixWeight* weight = nullptr;     // for WeightingKind::weight
  const ReducingFamily* family = nullptr;  // for WeightingKind::family
  double order = 2.0;                       // p in W^{1/p}
  int sample_bits = -1;                     // resolution for W sampling; -1 uses the finest level + 2

  static Weighting none() { return {}; }
  static Weighting by_weight(const MatrixWeight& w, double p, int sample_bits = -1);
  static Weighting by_family(const ReducingFamily& fam);
};

struct LevelOptions {
  /// Replace 1_Q by 1_{E_Q} with E_Q the lower half of Q along axis 0.
  bool selected_half = false;
};

/// Per-level fields l(Q)^{-s} |V_Q t_Q| |Q|^{-1/2} 1_Q with V the weighting.
LevelFamily level_fields(const CoefficientField& t, double s, const Weighting& weighting,
                         const LevelOptions& opt = {});

NormResult seq_norm(const CoefficientField& t, const SpaceParams& params, const Weighting& weighting,
                    const LevelOptions& opt = {});
NormResult finfty_norm(const CoefficientField& t, double s, double q, const Weighting& weighting);

/// (t*_{r,lambda})_Q = [sum_{l(R) = l(Q)} |t_R|^r (1 + |x_R - x_Q| / l(Q))^{-lambda}]^{1/r},
/// returned as an m = 1 field. r = infinity takes the maximum.
CoefficientField maximal_sequence(const CoefficientField& t, double r, double lambda);

struct IdentityCheck {
  std::string name;
  bool applicable = false;
  bool passed = false;
  std::string reason;  // why the check was skipped
  double lhs = 0.0;
  double rhs = 0.0;
  double bound = 0.0;  // relative error, or the allowed constant
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_passed() const;
};

/// (a) the B/F embedding chain with constant 1; (b) the (tau, q) = (1/p, inf)
/// equality with the p = infinity norm at s + n(tau - 1/p); (c) the two-sided
/// bound for tau > 1/p; (d) q = infinity F against the p = infinity B path;
/// (e) the ratio between the q-scale infinity norm and tau = 1/p (reported).
IdentityReport identity_checks(const CoefficientField& t, const SpaceParams& params, const Weighting& weighting);

nlohmann::json to_json(const IdentityReport& r);

}  // namespace mwt
