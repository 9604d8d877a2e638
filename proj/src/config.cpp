#include "mwt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mwt/container.hpp"
#include "mwt/errors.hpp"

#ifndef MWT_VERSION_HASH
#define MWT_VERSION_HASH "unknown"
#endif

namespace mwt {

namespace {

using nlohmann::json;

// Reads an object member by member and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) { return j_.at(key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return to_number(j_.at(key), where_ + "." + key);
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + ": expected an integer");
    return v.get<int>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key \"" + k + "\"");
  }

  static double to_number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) return kInf;
    throw ConfigError(where + ": expected a number or \"inf\"");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Point read_point(const json& v, int n, const std::string& where) {
  if (v.is_number() && n == 1) return Point{v.get<double>()};
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw ConfigError(where + ": expected " + std::to_string(n) + " coordinates");
  Point p{};
  for (int i = 0; i < n; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) throw ConfigError(where + ": coordinates must be numbers");
    p[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return p;
}

json point_json(const Point& p, int n) {
  json a = json::array();
  for (int i = 0; i < n; ++i) a.push_back(p[static_cast<std::size_t>(i)]);
  return a;
}

WeightSpec read_weight(const json& v, int n) {
  WeightSpec w;
  if (v.is_string()) {
    w.kind = v.get<std::string>();
    return w;
  }
  Section s(v, "weight");
  w.kind = s.text("kind", w.kind);
  w.a = s.number("a", w.a);
  w.b = s.number("b", w.b);
  w.scale = s.number("scale", w.scale);
  w.d = s.number("d", w.d);
  w.dtilde = s.number("dtilde", w.dtilde);
  if (s.has("x0")) w.x0 = read_point(s.raw("x0"), n, "weight.x0");
  w.a1 = s.number("a1", w.a1);
  w.a2 = s.number("a2", w.a2);
  w.angle_rate = s.number("angle_rate", w.angle_rate);
  w.path = s.text("path", w.path);
  s.finish();
  return w;
}

SpaceParams read_space(const json& v, std::size_t i) {
  const std::string where = "spaces[" + std::to_string(i) + "]";
  Section s(v, where);
  SpaceParams sp;
  sp.s = s.number("s", sp.s);
  sp.tau = s.number("tau", sp.tau);
  sp.p = s.number("p", sp.p);
  sp.q = s.number("q", sp.q);
  const std::string kind = s.text("kind", "B");
  if (kind == "B")
    sp.kind = SpaceKind::B;
  else if (kind == "F")
    sp.kind = SpaceKind::F;
  else
    throw ConfigError(where + ".kind: expected \"B\" or \"F\"");
  s.finish();
  try {
    sp.validate();
  } catch (const Error& e) {
    throw ConfigError(where + ": spaces precondition: " + e.what());
  }
  return sp;
}

json number_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

void validate(ExperimentConfig& c) {
  if (c.n < 1 || c.n > kMaxSpaceDim) throw ConfigError("n: space dimension must be 1..3");
  if (c.m < 1 || c.m > kMaxMatrixDim) throw ConfigError("m: matrix dimension must be 1..4");
  if (!(c.p > 0.0) || !std::isfinite(c.p)) throw ConfigError("p: exponent must be a positive finite number");
  if (c.window_j_min > c.window_j_max) throw ConfigError("window: j_min exceeds j_max");
  if (c.window_j_min < 0 || c.window_j_max > 20) throw ConfigError("window: levels must lie in 0..20");
  if (c.apdim_i_max < 2) throw ConfigError("apdim.i_max: need at least 2 dilation steps for a tail fit");
  if (c.apdim_stride < 0) throw ConfigError("apdim.stride must be nonnegative");
  if (c.filters.n != c.n) throw ConfigError("filters: dimension must match n");
  if (c.quad.order < 1 || c.quad.min_cells < 1 || c.quad.grading_depth < 0 || !(c.quad.rel_tol > 0.0))
    throw ConfigError("quadrature: order, min_cells must be positive and rel_tol > 0");
  if (c.reduce_directions < 2 * c.m) throw ConfigError("reduce.directions: need at least 2m fitting directions");
  if (c.draws < 1) throw ConfigError("draws must be positive");
  if (c.domain && (c.domain->n != c.n || !(c.domain->edge() > 0.0)))
    throw ConfigError("domain: must be an n-cube with positive edge");
  try {
    (void)build_filters(c.filters);
  } catch (const Error& e) {
    throw ConfigError(std::string("filters precondition: ") + e.what());
  }
  try {
    const MatrixWeight w = make_weight(c);
    if (w.matrix_dim() != c.m) throw ConfigError("m: does not match the weight kind");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("weights precondition: ") + e.what());
  }
}

}  // namespace

CubeWindow ExperimentConfig::window() const {
  return CubeWindow::make(n, window_j_min, window_j_max, domain ? *domain : default_domain(n));
}

ApdimConfig ExperimentConfig::apdim() const {
  ApdimConfig a;
  a.domain = domain;
  a.i_max = apdim_i_max;
  a.j_min = apdim_j_min;
  a.j_max = apdim_j_max;
  a.stride = apdim_stride;
  a.quad = quad;
  a.reduce = reduce();
  return a;
}

ReduceOptions ExperimentConfig::reduce() const {
  ReduceOptions r;
  r.method = reduce_method;
  r.directions = reduce_directions;
  r.quad = quad;
  return r;
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Section top(j, "config");
  c.n = top.integer("n", c.n);
  c.m = top.integer("m", c.m);
  c.p = top.number("p", c.p);
  if (top.has("weight")) c.weight = read_weight(top.raw("weight"), c.n);
  if (c.weight.kind == "conjugated_block" && !j.contains("m")) c.m = 2;
  if (top.has("domain")) {
    Section d(top.raw("domain"), "domain");
    Point lo = d.has("lo") ? read_point(d.raw("lo"), c.n, "domain.lo") : Point{};
    const double edge = d.number("edge", 1.0);
    d.finish();
    c.domain = Box::cube(c.n, lo, edge);
  }
  if (top.has("window")) {
    Section w(top.raw("window"), "window");
    c.window_j_min = w.integer("j_min", c.window_j_min);
    c.window_j_max = w.integer("j_max", c.window_j_max);
    w.finish();
  }
  if (top.has("apdim")) {
    Section a(top.raw("apdim"), "apdim");
    c.apdim_i_max = a.integer("i_max", c.apdim_i_max);
    c.apdim_j_min = a.integer("j_min", c.apdim_j_min);
    c.apdim_j_max = a.integer("j_max", c.apdim_j_max);
    c.apdim_stride = a.integer("stride", c.apdim_stride);
    a.finish();
  }
  if (top.has("spaces")) {
    const json& arr = top.raw("spaces");
    if (!arr.is_array() || arr.empty()) throw ConfigError("spaces: expected a nonempty array");
    c.spaces.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) c.spaces.push_back(read_space(arr[i], i));
  } else {
    c.spaces = {SpaceParams{0.0, 0.0, c.p, 2.0, SpaceKind::B}};
  }
  c.filters.n = c.n;
  c.filters.bits = c.n == 1 ? 10 : 7;
  if (top.has("filters")) {
    Section f(top.raw("filters"), "filters");
    c.filters.bits = f.integer("bits", c.filters.bits);
    c.filters.order = f.integer("order", c.filters.order);
    c.filters.j_min = f.integer("j_min", c.filters.j_min);
    c.filters.j_max = f.integer("j_max", c.filters.j_max);
    f.finish();
  }
  if (top.has("quadrature")) {
    Section q(top.raw("quadrature"), "quadrature");
    c.quad.order = q.integer("order", c.quad.order);
    c.quad.min_cells = q.integer("min_cells", c.quad.min_cells);
    c.quad.grading_depth = q.integer("grading_depth", c.quad.grading_depth);
    c.quad.rel_tol = q.number("rel_tol", c.quad.rel_tol);
    q.finish();
  }
  if (top.has("reduce")) {
    Section r(top.raw("reduce"), "reduce");
    try {
      c.reduce_method = reduce_method_from_string(r.text("method", to_string(c.reduce_method)));
    } catch (const Error& e) {
      throw ConfigError(std::string("reduce.method: ") + e.what());
    }
    c.reduce_directions = r.integer("directions", c.reduce_directions);
    r.finish();
  }
  c.draws = top.integer("draws", c.draws);
  if (top.has("seed")) {
    const json& v = top.raw("seed");
    if (!v.is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
    c.seed = v.get<std::uint64_t>();
  }
  c.out = top.text("out", c.out);
  top.finish();
  validate(c);
  return c;
}

ExperimentConfig parse_config_source(const std::string& source) {
  json j;
  const auto first = source.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && source[first] == '{') {
      j = json::parse(source);
    } else {
      std::ifstream is(source);
      if (!is) throw ConfigError("cannot open config file " + source);
      j = json::parse(is);
    }
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json weight = {{"kind", c.weight.kind}};
  const std::string& k = c.weight.kind;
  if (k == "power_log") {
    weight["a"] = c.weight.a;
    weight["b"] = c.weight.b;
    weight["scale"] = c.weight.scale;
  } else if (k == "two_singularity") {
    weight["d"] = c.weight.d;
    weight["dtilde"] = c.weight.dtilde;
    weight["x0"] = point_json(c.weight.x0, c.n);
  } else if (k == "conjugated_block") {
    weight["a1"] = c.weight.a1;
    weight["a2"] = c.weight.a2;
    weight["angle_rate"] = c.weight.angle_rate;
  } else if (k == "samples") {
    weight["path"] = c.weight.path;
  }
  const Box dom = c.domain ? *c.domain : default_domain(c.n);
  json spaces = json::array();
  for (const auto& s : c.spaces)
    spaces.push_back({{"s", s.s}, {"tau", s.tau}, {"p", number_json(s.p)}, {"q", number_json(s.q)},
                      {"kind", to_string(s.kind)}});
  return {{"weight", weight},
          {"n", c.n},
          {"m", c.m},
          {"p", c.p},
          {"domain", {{"lo", point_json(dom.lo, c.n)}, {"edge", dom.edge()}}},
          {"window", {{"j_min", c.window_j_min}, {"j_max", c.window_j_max}}},
          {"apdim", {{"i_max", c.apdim_i_max}, {"j_min", c.apdim_j_min}, {"j_max", c.apdim_j_max},
                     {"stride", c.apdim_stride}}},
          {"spaces", spaces},
          {"filters", {{"bits", c.filters.bits}, {"order", c.filters.order}, {"j_min", c.filters.j_min},
                       {"j_max", c.filters.j_max}}},
          {"quadrature", {{"order", c.quad.order}, {"min_cells", c.quad.min_cells},
                          {"grading_depth", c.quad.grading_depth}, {"rel_tol", c.quad.rel_tol}}},
          {"reduce", {{"method", to_string(c.reduce_method)}, {"directions", c.reduce_directions}}},
          {"draws", c.draws},
          {"seed", c.seed},
          {"out", c.out}};
}

MatrixWeight make_weight(const ExperimentConfig& c) {
  const WeightSpec& w = c.weight;
  MatrixWeight out = [&] {
    if (w.kind == "identity") return MatrixWeight::identity(c.n, c.m);
    if (w.kind == "power_log") return MatrixWeight::power_log(c.n, c.m, w.a, w.b, w.scale);
    if (w.kind == "two_singularity") return MatrixWeight::two_singularity(c.n, c.m, w.d, w.dtilde, c.p, w.x0);
    if (w.kind == "conjugated_block") return MatrixWeight::conjugated_block(c.n, w.a1, w.a2, w.angle_rate);
    if (w.kind == "samples") {
      if (w.path.empty()) throw ConfigError("weight.path: required for sampled weights");
      return MatrixWeight::grid_sampled(load_weight_samples(w.path));
    }
    throw ConfigError("weight.kind: unknown weight \"" + w.kind + "\"");
  }();
  if (c.domain) out = out.with_domain(*c.domain);
  return out;
}

std::string version_hash() { return MWT_VERSION_HASH; }

}  // namespace mwt
