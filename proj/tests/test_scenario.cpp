#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "relloc/causality.hpp"
#include "relloc/scenario.hpp"

using namespace relloc;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("relloc_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

json strip_timing(json doc) {
  for (auto& s : doc["scenarios"]) s.erase("wall_time");
  return doc;
}

const json kSmall = json::parse(R"({
  "seed": 3,
  "scenarios": [
    {"type": "nsc", "name": "a", "dim": 3, "kraus": 2, "repeat": 3},
    {"type": "luders_equivalence", "name": "b", "family": "random", "count": 10},
    {"type": "gentle_sweep", "name": "c", "count": 200},
    {"type": "beck", "name": "d", "family": "commuting", "count": 20},
    {"type": "hw_search", "name": "e", "dims": [3], "budget": 20000},
    {"type": "cross_lab_commutator", "name": "f", "n": 12, "kind": "frame_smeared",
     "delta0": [0, 1, 2, 3], "delta0_prime": [6, 7, 8, 9]}
  ]
})");

}  // namespace

TEST(Parse, AcceptsListOrObject) {
  EXPECT_TRUE(parse_scenarios(json::array()).empty());
  const auto list = parse_scenarios(json::parse(R"([{"type": "nsc"}])"));
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0].name, "nsc#0");
  EXPECT_EQ(list[0].pointer, "/0");
  EXPECT_EQ(list[0].tol, kDefaultTol);
  const auto obj = parse_scenarios(kSmall);
  EXPECT_EQ(obj.size(), 6u);
  EXPECT_EQ(obj[0].seed, 3u);
  EXPECT_EQ(obj[0].repeat, 3);
  EXPECT_EQ(obj[2].pointer, "/scenarios/2");
}

TEST(Parse, OverridesFromOptions) {
  RunOptions opts;
  opts.tol = 1e-6;
  opts.seed = 99;
  const auto s = parse_scenarios(kSmall, opts);
  EXPECT_EQ(s[1].tol, 1e-6);
  EXPECT_EQ(s[1].seed, 99u);
}

TEST(Parse, SchemaErrorsPointAtTheField) {
  auto pointer_of = [](const json& doc) {
    try {
      parse_scenarios(doc);
    } catch (const SchemaError& e) {
      return e.pointer();
    }
    return std::string("no error");
  };
  EXPECT_EQ(pointer_of(json::parse(R"([{"type": "bogus"}])")), "/0/type");
  EXPECT_EQ(pointer_of(json::parse(R"({"scenarios": [{"type": "nsc"}, {"type": "nsc", "tol": -1}]})")),
            "/scenarios/1/tol");
  EXPECT_EQ(pointer_of(json::parse(R"([{"type": "nsc", "repeat": 0}])")), "/0/repeat");
  EXPECT_EQ(pointer_of(json::parse(R"({"seed": -4, "scenarios": []})")), "/seed");
  EXPECT_EQ(pointer_of(json::parse(R"({"nothing": 1})")), "/scenarios");
}

TEST(Run, CheckParameterErrorsArePrefixed) {
  const auto s = parse_scenarios(json::parse(
      R"({"scenarios": [{"type": "nsc", "effect": {"type": "effect", "matrix": {"dim": 2, "re": [1, 0, 0], "im": [0, 0, 0, 0]}}}]})"));
  try {
    run_scenarios(s, 1);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer().rfind("/scenarios/0/effect", 0), 0u) << e.pointer();
  }
}

TEST(Run, LibraryErrorsBecomeFailures) {
  // A sharp lab cannot be conditioned, which is a domain failure, not bad input.
  const auto s = parse_scenarios(json::parse(
      R"([{"type": "conditional_bound", "n": 8, "kind": "sharp", "delta0": [0, 1]}])"));
  const auto r = run_scenarios(s, 1);
  EXPECT_EQ(r[0].report.verdict(), Verdict::Fail);
  ASSERT_FALSE(r[0].report.notes().empty());
  EXPECT_NE(r[0].report.notes()[0].find("error:"), std::string::npos);
}

TEST(Run, DeterministicAndWorkerIndependent) {
  const auto s = parse_scenarios(kSmall);
  const json a = strip_timing(report_document(run_scenarios(s, 1)));
  const json b = strip_timing(report_document(run_scenarios(s, 1)));
  const json c = strip_timing(report_document(run_scenarios(s, 4)));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a.dump(), c.dump());
  EXPECT_EQ(a["summary"]["fail"], 0);
  EXPECT_EQ(a["scenarios"][5]["verdict"], "INFO");
}

TEST(Run, SeedsChangeRandomChecks) {
  RunOptions o1, o2;
  o1.seed = 1;
  o2.seed = 2;
  const auto r1 = run_scenarios(parse_scenarios(kSmall, o1), 1);
  const auto r2 = run_scenarios(parse_scenarios(kSmall, o2), 1);
  EXPECT_NE(to_json(r1[0].report).dump(), to_json(r2[0].report).dump());
}

TEST(Report, CsvAndJsonShapes) {
  const auto r = run_scenarios(parse_scenarios(json::parse(R"([{"type": "beck", "name": "one", "family": "hw_example"}])")), 1);
  const std::string csv = csv_summary(r);
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "name,verdict,max_residual,tol,wall_time");
  EXPECT_EQ(row.rfind("one,PASS,", 0), 0u);
  EXPECT_FALSE(std::getline(in, extra));

  const auto hw = run_scenarios(parse_scenarios(json::parse(R"([{"type": "hw_search", "name": "w", "budget": 20000}])")), 1);
  const json doc = report_document(hw);
  EXPECT_TRUE(doc["scenarios"][0]["witnesses"].contains("instrument"));
  EXPECT_EQ(csv_summary(hw).find("\"re\""), std::string::npos);
}

TEST(Report, JsonRoundTripIsBitExact) {
  const auto r = run_scenarios(parse_scenarios(kSmall), 1);
  const json doc = json::parse(report_document(r).dump());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const CheckReport back = report_from_json(doc["scenarios"][i]);
    ASSERT_EQ(back.residuals().size(), r[i].report.residuals().size());
    for (std::size_t k = 0; k < back.residuals().size(); ++k) {
      EXPECT_EQ(back.residuals()[k].value, r[i].report.residuals()[k].value);
      EXPECT_EQ(back.residuals()[k].threshold, r[i].report.residuals()[k].threshold);
    }
    EXPECT_EQ(back.verdict(), r[i].report.verdict());
  }
}

TEST(File, ExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(run_scenario_file(temp_file("empty.json", "[]"), std::nullopt, std::nullopt, {}, out, err), 0);
  EXPECT_EQ(run_scenario_file(temp_file("bad.json", "{not json"), std::nullopt, std::nullopt, {}, out, err), 2);
  EXPECT_EQ(run_scenario_file("/nonexistent/file.json", std::nullopt, std::nullopt, {}, out, err), 2);
  const std::string malformed = R"([{"type": "validate", "object": {"type": "effect",
      "matrix": {"dim": 2, "re": [1, 0, 0, 1], "im": [0, 0]}}}])";
  err.str("");
  EXPECT_EQ(run_scenario_file(temp_file("malformed.json", malformed), std::nullopt, std::nullopt, {}, out, err), 2);
  EXPECT_NE(err.str().find("/0/object/matrix"), std::string::npos) << err.str();
  const std::string failing = R"([{"type": "validate", "object": {"type": "effect",
      "matrix": {"dim": 2, "re": [1.2, 0, 0, 0], "im": [0, 0, 0, 0]}}}])";
  EXPECT_EQ(run_scenario_file(temp_file("failing.json", failing), std::nullopt, std::nullopt, {}, out, err), 1);
  const std::string report = (std::filesystem::temp_directory_path() / "relloc_test_report.json").string();
  EXPECT_EQ(run_scenario_file(temp_file("empty2.json", "[]"), report, std::nullopt, {}, out, err), 0);
  const json doc = json::parse(std::ifstream(report));
  EXPECT_TRUE(doc["scenarios"].empty());
  EXPECT_EQ(run_scenario_file(temp_file("empty3.json", "[]"), std::string("/nonexistent/dir/r.json"), std::nullopt,
                              {}, out, err),
            2);
}

TEST(Generate, KindsAreDeterministicAndValid) {
  for (const std::string kind : {"state", "effect", "povm", "luders_instrument", "commuting_pair", "lattice_system"}) {
    const std::string a = generate_instance(kind, 4, 17).dump(2);
    EXPECT_EQ(a, generate_instance(kind, 4, 17).dump(2)) << kind;
    EXPECT_NE(a, generate_instance(kind, 4, 18).dump(2)) << kind;
  }
  const DensityState rho = state_from_json(generate_instance("state", 5, 1));
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_TRUE(validate(rho).passed());
  EXPECT_TRUE(validate(effect_from_json(generate_instance("effect", 5, 1))).passed());
  EXPECT_TRUE(validate(povm_from_json(generate_instance("povm", 5, 1))).passed());
  EXPECT_TRUE(validate(instrument_from_json(generate_instance("luders_instrument", 5, 1))).passed());
  const json pair = generate_instance("commuting_pair", 5, 1);
  EXPECT_LE(commutator_residual(povm_from_json(pair["first"]), povm_from_json(pair["second"])), 1e-12);
  EXPECT_TRUE(validate(system_from_json(generate_instance("lattice_system", 8, 1), "")).passed());
  EXPECT_THROW(generate_instance("nonsense", 3, 1), std::invalid_argument);
}

TEST(SystemFromJson, Fields) {
  const auto sys = system_from_json(json::parse(R"({"n": 8, "kind": "diagonal_smeared", "width": 1.0})"), "");
  EXPECT_EQ(sys.n, 8u);
  EXPECT_EQ(sys.kind, SystemKind::DiagonalSmeared);
  EXPECT_THROW(system_from_json(json::parse(R"({"kind": "fuzzy"})"), "/s"), SchemaError);
  EXPECT_THROW(system_from_json(json::parse(R"({"n": 1})"), ""), SchemaError);
  EXPECT_THROW(system_from_json(json::parse(R"({"spectrum": "odd"})"), ""), SchemaError);
}

TEST(CheckTypes, AllRegistered) {
  const auto& types = check_types();
  for (const char* t : {"nsc", "rcc", "luders_equivalence", "beck", "hw_search", "hc_audit", "cc_residual",
                        "projector_identity", "conditional_build", "gentle_sweep", "conditional_bound", "composition",
                        "cross_lab_commutator", "separation", "lab_contains", "validate"}) {
    EXPECT_NE(std::find(types.begin(), types.end(), t), types.end()) << t;
  }
}
