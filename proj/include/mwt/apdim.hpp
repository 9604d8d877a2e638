#pragma once

// A_p-dimension estimation: the cross-cube sequence a_i, its tail slope,
// duality, growth envelopes, doubling exponents and reverse Hoelder probes.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/dyadic.hpp"
#include "mwt/quadrature.hpp"
#include "mwt/reducing.hpp"
#include "mwt/weights.hpp"

namespace mwt {

struct ApDimensions {
  double d = 0.0;
  double dtilde = 0.0;  // 0 when p <= 1
  double delta = 0.0;   // d / p + dtilde / p'

  static ApDimensions make(double d, double dtilde, double p);
};

/// Base cubes Q over which a_i takes its supremum. Every cube satisfies
/// 2^{i_max} Q inside the domain.
struct BaseFamily {
  Box domain;
  int i_max = 0;
  std::vector<DyadicCube> cubes;
};

/// Window cubes of levels j_min..j_max (relative to `domain`) whose
/// 2^{i_max}-dilation fits, keeping every `stride`-th cube of each level
/// (stride 0 picks one that leaves at most 64 per level), plus every fitting
/// cube that abuts a singular point.
BaseFamily base_family(std::span<const Point> singular, const Box& domain, int j_min, int j_max, int i_max,
                       int stride = 0);

enum class ARoute {
  direct,          // avg over Q against 2^i Q (the defining double average)
  reducing,        // ||A_Q A_{2^i Q}^{-1}||^p
  upper,           // the defining average with the roles of Q and 2^i Q swapped
  upper_reducing,  // ||A_{2^i Q} A_Q^{-1}||^p
};

std::string to_string(ARoute r);

struct ASequence {
  ARoute route = ARoute::direct;
  std::vector<double> a;             // a_0 .. a_{i_max}
  std::vector<DyadicCube> argmax;    // base cube attaining each a_i
  std::size_t cubes = 0;
};

ASequence a_sequence(const MatrixWeight& w, double p, const BaseFamily& family, ARoute route,
                     const QuadratureSpec& quad, const ReduceOptions& reduce = {});

struct DimensionEstimate {
  ASequence seq;
  double slope = 0.0;     // least-squares slope of log2 a_i over the tail
  int i_lo = 0;
  int i_hi = 0;
  double residual = 0.0;  // RMS residual of the tail fit
};

/// Tail regression over i in [ceil(i_max / 2), i_max].
DimensionEstimate fit_tail(const ASequence& seq);

struct ApdimConfig {
  std::optional<Box> domain;  // defaults to the weight's working domain
  int i_max = 8;
  int j_min = -1;             // -1: i_max + 1
  int j_max = -1;             // -1: j_min + 5
  int stride = 0;
  QuadratureSpec quad;
  ReduceOptions reduce;
  /// Direct averages for scalar weights, reducing operators otherwise.
  std::optional<ARoute> route;
};

struct DimensionReport {
  double p = 2.0;
  ApDimensions dims;
  ApDimensions raw;                      // before clamping to [0, n)
  DimensionEstimate primal;
  std::optional<DimensionEstimate> dual;   // dual weight at order p'
  std::optional<DimensionEstimate> upper;  // upper sequence of W at order p
  std::vector<std::string> flags;
};

DimensionReport estimate_dimensions(const MatrixWeight& w, double p, const ApdimConfig& cfg);

struct EnvelopeResult {
  double max_ratio = 0.0;
  DyadicCube witness_q;
  DyadicCube witness_r;
  std::size_t pairs = 0;
};

/// max over Q, R in the family window of ||A_Q A_R^{-1}|| divided by
/// max{(l(R)/l(Q))^{d/p}, (l(Q)/l(R))^{dtilde/p'}} (1 + |x_Q - x_R| / max(l(Q), l(R)))^Delta.
EnvelopeResult growth_envelope_check(const ReducingFamily& family, const ApDimensions& dims);

struct DoublingResult {
  double beta = 0.0;
  DyadicCube witness;
  std::size_t cubes = 0;
};

/// max over window cubes with 2Q in the base and sampled directions z of
/// log2( int_{2Q} |W^{1/p} z|^p / int_Q |W^{1/p} z|^p ).
DoublingResult doubling_exponent(const MatrixWeight& w, double p, const CubeWindow& window, int directions,
                                 const QuadratureSpec& quad);

struct ReverseHolderRow {
  double r = 1.0;
  double ratio = 0.0;  // sup over cubes and test matrices; infinite when divergent
  bool divergent = false;
};

struct ReverseHolderResult {
  std::vector<ReverseHolderRow> rows;
  double r_hat = 1.0;  // largest grid r with ratio <= bound (1 when none)
};

/// Test matrices: I and the rank-one projectors e_i e_i^*.
ReverseHolderResult reverse_holder_probe(const MatrixWeight& w, double p, const CubeWindow& window,
                                         const std::vector<double>& r_grid, double bound,
                                         const QuadratureSpec& quad);

enum class MVariant { embedding, lifting };  // the two convergence thresholds

/// Least integer strictly above the applicable maximum.
int admissible_M(double s, double tau, double p, const ApDimensions& dims, int n, MVariant variant);

nlohmann::json to_json(const ASequence& seq);
nlohmann::json to_json(const DimensionReport& r);

}  // namespace mwt
