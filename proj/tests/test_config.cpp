#include <doctest.h>

#include <string>

#include "mwt/config.hpp"
#include "mwt/errors.hpp"
#include "mwt/verify.hpp"

using namespace mwt;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal config fills defaults") {
    const ExperimentConfig c = parse_config(json{{"weight", "identity"}, {"p", 2}});
    CHECK(c.n == 1);
    CHECK(c.m == 1);
    CHECK(c.p == 2.0);
    CHECK(c.filters.bits == 10);
    const json resolved = to_json(c);
    CHECK(resolved.contains("spaces"));
    CHECK(resolved.contains("seed"));
    CHECK(parse_config(resolved).seed == c.seed);
  }

  TEST_CASE("invalid values name the violated precondition") {
    CHECK(config_error(json{{"weight", "identity"}, {"p", -1}}).find("p") != std::string::npos);
    const std::string diverge = config_error(json{{"weight", {{"kind", "power_log"}, {"a", -1.0}}}, {"n", 1}});
    CHECK(diverge.find("weights precondition") != std::string::npos);
    CHECK_FALSE(config_error(json{{"weight", "identity"}, {"bogus", 1}}).empty());
    CHECK_FALSE(config_error(json{{"weight", "identity"}, {"spaces", json::array({{{"tau", -1}}})}}).empty());
  }

  TEST_CASE("infinite exponents are accepted as strings") {
    const ExperimentConfig c =
        parse_config(json{{"weight", "identity"}, {"spaces", json::array({{{"p", "inf"}, {"q", "inf"}, {"kind", "F"}}})}});
    CHECK(std::isinf(c.spaces.front().p));
    CHECK(std::isinf(c.spaces.front().q));
  }

  TEST_CASE("inline sources parse like files") {
    const ExperimentConfig c = parse_config_source(R"({"weight": {"kind": "power_log", "a": -0.5}, "p": 2})");
    CHECK(make_weight(c).power_log_params().has_value());
  }

  TEST_CASE("tier names") {
    for (Tier t : {Tier::exact, Tier::paper, Tier::ratio, Tier::all}) CHECK(tier_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(tier_from_string("fast"), ConfigError);
  }
}
