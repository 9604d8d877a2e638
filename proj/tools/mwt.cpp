#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <json.hpp>

#include "mwt/apdim.hpp"
#include "mwt/config.hpp"
#include "mwt/errors.hpp"
#include "mwt/parallel.hpp"
#include "mwt/reducing.hpp"
#include "mwt/spaces.hpp"
#include "mwt/transform.hpp"
#include "mwt/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;
constexpr int kExitNumeric = 4;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string tier = "all";
  int threads = 1;
};

json envelope(const mwt::ExperimentConfig& cfg, const std::string& command) {
  return {{"command", command}, {"version", mwt::version_hash()}, {"config", mwt::to_json(cfg)}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw mwt::FormatError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw mwt::FormatError("cannot open " + path.string() + " for writing");
  os.precision(17);
  return os;
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int cmd_apdim(const mwt::ExperimentConfig& cfg, const fs::path& out) {
  const mwt::MatrixWeight w = mwt::make_weight(cfg);
  const mwt::DimensionReport rep = mwt::estimate_dimensions(w, cfg.p, cfg.apdim());
  json j = envelope(cfg, "apdim");
  j["report"] = mwt::to_json(rep);
  const mwt::CubeWindow win = cfg.window();
  const mwt::DoublingResult dbl = mwt::doubling_exponent(w, cfg.p, win, 64, cfg.quad);
  j["doubling_beta"] = dbl.beta;
  json ms = json::array();
  for (const auto& sp : cfg.spaces) {
    if (!std::isfinite(sp.p)) continue;
    ms.push_back({{"s", sp.s},
                  {"tau", sp.tau},
                  {"p", sp.p},
                  {"M_embedding", mwt::admissible_M(sp.s, sp.tau, sp.p, rep.dims, cfg.n, mwt::MVariant::embedding)},
                  {"M_lifting", mwt::admissible_M(sp.s, sp.tau, sp.p, rep.dims, cfg.n, mwt::MVariant::lifting)}});
  }
  j["admissible_M"] = ms;
  write_json(out / "apdim.json", j);

  auto csv = open_csv(out / "apdim_sequence.csv");
  csv << "route,i,a_i,log2_a_i\n";
  auto rows = [&](const mwt::DimensionEstimate& e) {
    for (std::size_t i = 0; i < e.seq.a.size(); ++i)
      csv << mwt::to_string(e.seq.route) << ',' << i << ',' << num(e.seq.a[i]) << ',' << num(std::log2(e.seq.a[i]))
          << '\n';
  };
  rows(rep.primal);
  if (rep.dual) rows(*rep.dual);
  if (rep.upper) rows(*rep.upper);
  std::cout << "d_hat " << rep.dims.d << " dtilde_hat " << rep.dims.dtilde << " delta_hat " << rep.dims.delta
            << " beta_hat " << dbl.beta << '\n';
  return 0;
}

int cmd_norms(const mwt::ExperimentConfig& cfg, const fs::path& out) {
  const mwt::MatrixWeight w = mwt::make_weight(cfg);
  const mwt::CubeWindow win = cfg.window();
  const mwt::FilterPair filters = mwt::build_filters(cfg.filters);
  const mwt::MatrixWeight w_unit = w.with_domain(mwt::Box::unit(cfg.n));
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  json rows = json::array();
  auto csv = open_csv(out / "norms.csv");
  csv << "draw,space,object,weighting,value\n";
  for (std::size_t si = 0; si < cfg.spaces.size(); ++si) {
    const mwt::SpaceParams& sp = cfg.spaces[si];
    const bool finite = std::isfinite(sp.p);
    const double order = finite ? sp.p : cfg.p;
    const auto fam = mwt::ReducingFamily::cached(w, order, win, cfg.reduce());
    const auto fam_unit = mwt::ReducingFamily::cached(w_unit, order, filters.window(), cfg.reduce());
    for (int d = 0; d < cfg.draws; ++d) {
      mwt::CoefficientField t = mwt::CoefficientField::zeros(win, cfg.m);
      for (auto& v : t.values) v = mwt::cplx(gauss(rng), gauss(rng));
      const mwt::GridFunction f = mwt::random_band_limited(filters, cfg.m, rng);
      auto record = [&](const std::string& object, const std::string& weighting, double value) {
        rows.push_back({{"draw", d}, {"space", si}, {"object", object}, {"weighting", weighting}, {"value", value}});
        csv << d << ',' << si << ',' << object << ',' << weighting << ',' << num(value) << '\n';
      };
      auto seq = [&](const mwt::Weighting& wt) {
        if (finite || sp.kind == mwt::SpaceKind::B) return mwt::seq_norm(t, sp, wt).value;
        return mwt::finfty_norm(t, sp.s, sp.q, wt).value;
      };
      record("sequence", "none", seq(mwt::Weighting::none()));
      record("sequence", "family", seq(mwt::Weighting::by_family(*fam)));
      if (finite) record("sequence", "weight", seq(mwt::Weighting::by_weight(w, sp.p)));
      record("function", "none", mwt::function_norm(f, filters, sp, mwt::Weighting::none()).value);
      record("function", "family", mwt::function_norm(f, filters, sp, mwt::Weighting::by_family(*fam_unit)).value);
      if (finite)
        record("function", "weight", mwt::function_norm(f, filters, sp, mwt::Weighting::by_weight(w_unit, sp.p)).value);
    }
  }
  json j = envelope(cfg, "norms");
  j["norms"] = rows;
  write_json(out / "norms.json", j);
  std::cout << "wrote " << rows.size() << " norms\n";
  return 0;
}

int cmd_filters(const mwt::ExperimentConfig& cfg, const fs::path& out) {
  const mwt::FilterPair f = mwt::build_filters(cfg.filters);
  json j = envelope(cfg, "filters");
  j["filters"] = mwt::filters_to_json(f);
  write_json(out / "filters.json", j);
  mwt::write_filters_csv(f, out / "filters.csv");
  std::cout << "partition_error " << mwt::partition_error(f) << " lower_bound " << mwt::lower_bound(f) << '\n';
  return 0;
}

int cmd_reduce(const mwt::ExperimentConfig& cfg, const fs::path& out) {
  const mwt::MatrixWeight w = mwt::make_weight(cfg);
  const mwt::ReducingFamily fam = mwt::ReducingFamily::build(w, cfg.p, cfg.window(), cfg.reduce());
  fam.save(out / "family.json");
  auto csv = open_csv(out / "family_brackets.csv");
  csv << "level,index,op_norm,vector_lo,vector_hi,matrix_lo,matrix_hi\n";
  for (const auto& q : fam.window().all_cubes()) {
    const auto& dg = fam.diagnostics(q);
    csv << q.level << ',' << q.index[0];
    for (int i = 1; i < q.n; ++i) csv << ':' << q.index[static_cast<std::size_t>(i)];
    csv << ',' << num(mwt::op_norm(fam.at(q).matrix())) << ',' << num(dg.check.vectors.lo) << ','
        << num(dg.check.vectors.hi) << ',' << num(dg.check.matrices.lo) << ',' << num(dg.check.matrices.hi) << '\n';
  }
  json j = envelope(cfg, "reduce");
  const auto vb = fam.overall_bracket(), mb = fam.overall_matrix_bracket();
  j["method"] = mwt::to_string(fam.method());
  j["key"] = fam.key();
  j["vector_bracket"] = {vb.lo, vb.hi};
  j["matrix_bracket"] = {mb.lo, mb.hi};
  j["family_file"] = "family.json";
  write_json(out / "reduce.json", j);
  std::cout << "bracket [" << vb.lo << ", " << vb.hi << "]\n";
  return 0;
}

int cmd_verify(const mwt::ExperimentConfig& cfg, const fs::path& out, const std::string& tier) {
  mwt::VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.tier = mwt::tier_from_string(tier);
  opt.config = cfg;
  const mwt::VerifyReport rep = mwt::run_verify(opt);
  write_json(out / "verify.json", rep.to_json());
  for (const auto& c : rep.criteria)
    std::cout << (c.passed ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << '\n';
  if (rep.configured)
    std::cout << (rep.configured->passed ? "PASS" : "FAIL") << " configured weight checks\n";
  return rep.all_passed() ? 0 : kExitVerify;
}

int diagnose(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-weighted function spaces: dimensions, norms and verification"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Config file path or inline JSON object");
  app.add_option("--seed", o.seed, "Random seed (overrides the config)");
  app.add_option("--out", o.out, "Output directory (overrides the config)");
  app.add_option("--tier", o.tier, "Verify tier")->check(CLI::IsMember({"exact", "paper", "ratio", "all"}));
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1, 256));
  app.fallthrough();
  for (const char* name : {"apdim", "norms", "verify", "filters", "reduce"}) app.add_subcommand(name);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return diagnose("usage", e.what(), kExitConfig);
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    mwt::ExperimentConfig cfg =
        o.config.empty() ? mwt::parse_config(json::object()) : mwt::parse_config_source(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out.empty()) cfg.out = o.out;
    mwt::set_thread_count(o.threads);
    const fs::path out = cfg.out;
    fs::create_directories(out);
    if (command == "apdim") return cmd_apdim(cfg, out);
    if (command == "norms") return cmd_norms(cfg, out);
    if (command == "filters") return cmd_filters(cfg, out);
    if (command == "reduce") return cmd_reduce(cfg, out);
    return cmd_verify(cfg, out, o.tier);
  } catch (const mwt::ConfigError& e) {
    return diagnose("config", e.what(), kExitConfig);
  } catch (const mwt::Error& e) {
    return diagnose("numerical", e.what(), kExitNumeric);
  } catch (const fs::filesystem_error& e) {
    return diagnose("io", e.what(), kExitConfig);
  }
}
