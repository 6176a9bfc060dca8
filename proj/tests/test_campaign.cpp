#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mtto/campaign.hpp"

using namespace mtto;

namespace {

const char* kMinimal =
    R"({"d":1,"theta":{"factors":[{"kind":"full_shift","k":2}]},"checks":["theorem6"],)"
    R"("symbols":{"random":3,"band":2,"seed":7}})";

std::string pointer_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

TEST_CASE("minimal config parses") {
  const CampaignConfig c = parse_config(kMinimal);
  CHECK(c.d == 1);
  CHECK_FALSE(c.grid.has_value());
  CHECK(c.checks == std::vector<std::string>{"theorem6"});
  REQUIRE(c.random_symbols.has_value());
  CHECK(c.random_symbols->count == 3);
  CHECK(c.random_symbols->band == 2);
  CHECK(c.seed == 7);
  CHECK(c.theta.factors.size() == 1);
}

TEST_CASE("config errors carry the JSON pointer of the offending node") {
  CHECK(pointer_of(R"({"theta":{"factors":[{"kind":"full_shift","k":1}]}})") == "/d");
  CHECK(pointer_of(R"({"d":0,"theta":{"factors":[{"kind":"full_shift","k":1}]}})") == "/d");
  CHECK(pointer_of(R"({"d":1})") == "/theta");
  CHECK(pointer_of(R"({"d":1,"grid":12,"theta":{"factors":[{"kind":"full_shift","k":1}]}})") == "/grid");
  CHECK(pointer_of(R"({"d":1,"bogus":1,"theta":{"factors":[{"kind":"full_shift","k":1}]}})") == "/bogus");
  CHECK(pointer_of(R"({"d":1,"theta":{"factors":[{"kind":"twist"}]}})") == "/theta/factors/0/kind");
  CHECK(pointer_of(R"({"d":1,"theta":{"factors":[{"kind":"rank1","a":[0.5],"v":[[1,0]]}]}})") ==
        "/theta/factors/0/a");
  CHECK(pointer_of(R"({"d":1,"theta":{"factors":[{"kind":"full_shift","k":1}]},"checks":["nope"]})") ==
        "/checks/0");
  CHECK(pointer_of(R"({"d":1,"theta":{"factors":[{"kind":"full_shift","k":1}]},"symbols":{"random":2,"band":1}})") ==
        "/symbols/seed");
  CHECK(pointer_of(R"({"d":1,"theta":{"factors":[{"kind":"full_shift","k":1}]},"tol":{"rank":-1}})") ==
        "/tol/rank");
  CHECK(pointer_of("{not json") == "/");
}

TEST_CASE("zeros at the conditioning guard are rejected as spec errors") {
  CHECK_THROWS_AS(parse_config(R"({"d":1,"theta":{"factors":[{"kind":"rank1","a":[0.99,0],"v":[[1,0]]}]}})"),
                  SpecError);
}

TEST_CASE("explicit symbol lists round-trip through JSON") {
  const CampaignConfig c = parse_config(
      R"({"d":1,"theta":{"factors":[{"kind":"full_shift","k":2}]},)"
      R"("symbols":[{"band":1,"coefficients":[[[[1,0]]],[[[0,2]]],[[[3,0]]]]}]})");
  REQUIRE(c.symbols.size() == 1);
  CHECK(c.symbols[0].coefficient(0)(0, 0) == cplx(0.0, 2.0));
  const SymbolSpec back = parse_symbol(to_json(c.symbols[0]), 1, "");
  CHECK(back.coefficients() == c.symbols[0].coefficients());
}

TEST_CASE("golden campaign on z^2 passes quickly") {
  CampaignConfig c = parse_config(
      R"({"d":1,"theta":{"factors":[{"kind":"full_shift","k":2}]},"symbols":{"random":3,"band":2,"seed":7}})");
  const CampaignReport r = run_campaign(c);
  for (const auto& [name, check] : r.checks) {
    INFO(name);
    CHECK(check.pass);
  }
  CHECK(r.overall_pass);
  CHECK(r.checks.size() == kAllChecks.size());
  CHECK(r.wall_time_s < 5.0);
  CHECK(r.model_dim == 2);
}

TEST_CASE("a non-unitary U fails the inner check with NotInner") {
  const CampaignConfig c = parse_config(
      R"({"d":2,"theta":{"factors":[{"kind":"full_shift","k":1}],"U":[[[1,0],[0.1,0]],[[0,0],[1,0]]]},)"
      R"("checks":["inner"]})");
  const CampaignReport r = run_campaign(c);
  const CheckResult& inner = r.checks.at("inner");
  CHECK_FALSE(inner.pass);
  REQUIRE(inner.error_kind.has_value());
  CHECK(*inner.error_kind == "NotInner");
  CHECK_FALSE(r.overall_pass);
}

TEST_CASE("non-pure Theta: membership checks are unsupported, the rest pass") {
  const CampaignConfig c = parse_config(
      R"({"d":2,"theta":{"factors":[{"kind":"rank1","a":[0.5,0],"v":[[1,0],[0,0]]},)"
      R"({"kind":"rank1","a":[0.3,0],"v":[[1,0],[0,0]]}]},"symbols":{"random":2,"band":1,"seed":3}})");
  const CampaignReport r = run_campaign(c);
  CHECK(r.pure == false);
  CHECK(r.checks.at("theorem1").pass);
  CHECK(r.checks.at("theorem4").pass);
  CHECK(r.checks.at("lemma1").pass);
  CHECK(r.checks.at("theorem5").error_kind == std::optional<std::string>("UnsupportedDomain"));
  CHECK_FALSE(r.overall_pass);
}

TEST_CASE("repeated runs give a byte-identical report body") {
  const std::string text =
      R"({"d":2,"seed":5,"theta":{"factors":[{"kind":"rank1","a":[0.5,0.1],"v":[[1,0],[0,0]]},)"
      R"({"kind":"rank1","a":[-0.2,0.4],"v":[[0,0],[1,0]]},{"kind":"full_shift","k":1}]},)"
      R"("symbols":{"random":2,"band":2,"seed":9}})";
  const CampaignConfig c = parse_config(text);
  const std::string a = run_campaign(c).to_json(false).dump(2);
  const std::string b = run_campaign(parse_config(text)).to_json(false).dump(2);
  CHECK(a == b);
  CHECK(a.find("timing") == std::string::npos);
  CHECK(run_campaign(c).to_json(true).dump().find("timing") != std::string::npos);
}

TEST_CASE("report residuals carry 12 significant digits") {
  CHECK(report_round(0.0) == 0.0);
  CHECK(report_round(1.23456789012345e-9) == 1.23456789012e-9);
  CHECK(report_round(2.0 / 3.0) == 0.666666666667);
}

TEST_CASE("CSV round trip is exact") {
  Matrix m(2, 3);
  m << cplx(1.0 / 3.0, -2.5e-17), cplx(0.0, 1.0), 7.0, cplx(-1e300, 4e-300), cplx(0.1, 0.2), 0.0;
  const std::string csv = matrix_to_csv(m);
  CHECK(matrix_from_csv(csv) == m);
  CHECK(csv.find('"') != std::string::npos);
  CHECK_THROWS(matrix_from_csv("\"1,2\",\"3\"\n"));
}

TEST_CASE("campaign matrices and written outputs") {
  const CampaignConfig c = parse_config(
      R"({"d":1,"theta":{"factors":[{"kind":"full_shift","k":2}]},"symbols":{"random":2,"band":1,"seed":7}})");
  Matrix shift(2, 2);
  shift << 0.0, 0.0, 1.0, 0.0;
  CHECK((campaign_matrix(c, "shift") - shift).cwiseAbs().maxCoeff() < 1e-14);
  Matrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CHECK((campaign_matrix(c, "tau") - swap).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(campaign_matrix(c, "mtto:1").rows() == 2);
  CHECK_THROWS(campaign_matrix(c, "mtto:5"));
  CHECK_THROWS(campaign_matrix(c, "nonsense"));

  const CampaignReport r = run_campaign(c);
  const auto dir = std::filesystem::temp_directory_path() / "mtto_lab_test_outputs";
  std::filesystem::remove_all(dir);
  write_outputs(r, dir.string(), false);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "shift.csv"));
  CHECK(std::filesystem::exists(dir / "tau.csv"));
  CHECK(std::filesystem::exists(dir / "mtto_0.csv"));
  CHECK(matrix_from_csv(slurp(dir / "shift.csv")) == r.matrices.at("shift"));
  std::filesystem::remove_all(dir);
  write_outputs(r, dir.string(), true);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK_FALSE(std::filesystem::exists(dir / "shift.csv"));
  std::filesystem::remove_all(dir);
}
