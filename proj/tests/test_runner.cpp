#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "finsym/report.hpp"
#include "finsym/runner.hpp"

using namespace finsym;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"json({
    "dimension": 2,
    "metric": {"family": "custom", "F": "sqrt(y1^2 + y2^2)",
               "domain": {"lower": [-1, -1], "upper": [1, 1]}},
    "two_form": {"type": "standard"},
    "vector_field": {"components": ["1", "x1"]},
    "sampling": {"mode": "grid", "count": 9, "y_per_x": 1}
  })json");
}

std::string error_path(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

std::string scenario_file(const std::string& name) { return std::string(FINSYM_SCENARIO_DIR) + "/" + name + ".json"; }

}  // namespace

TEST(Config, MinimalDocumentParses) {
  const ScenarioConfig c = parse_scenario(minimal());
  EXPECT_EQ(c.dimension, 2u);
  EXPECT_TRUE(c.form.has_value());
  EXPECT_TRUE(c.field.has_value());
  EXPECT_FALSE(c.chart.has_value());
  EXPECT_EQ(c.sampling.count, 9u);
}

TEST(Config, ErrorsNameTheOffendingField) {
  json odd = minimal();
  odd["dimension"] = 3;
  odd["metric"]["F"] = "sqrt(y1^2 + y2^2 + y3^2)";
  odd["metric"]["domain"] = json::parse(R"({"lower": [-1, -1, -1], "upper": [1, 1, 1]})");
  odd["vector_field"]["components"] = {"1", "0", "0"};
  EXPECT_EQ(error_path(odd), "/dimension");

  json no_seed = minimal();
  no_seed["sampling"]["mode"] = "random";
  EXPECT_EQ(error_path(no_seed), "/sampling/seed");

  json unknown = minimal();
  unknown["metric"]["colour"] = "red";
  EXPECT_EQ(error_path(unknown), "/metric/colour");

  json bad_expr = minimal();
  bad_expr["vector_field"]["components"] = {"1", "x1 +"};
  EXPECT_EQ(error_path(bad_expr), "/vector_field/components/1");

  json wrong_var = minimal();
  wrong_var["vector_field"]["components"] = {"1", "y1"};
  EXPECT_EQ(error_path(wrong_var), "/vector_field/components/1");

  json missing = minimal();
  missing.erase("metric");
  EXPECT_EQ(error_path(missing), "/metric");

  json unbounded = minimal();
  unbounded["metric"].erase("domain");
  EXPECT_EQ(error_path(unbounded), "/sampling/box");

  json tol = minimal();
  tol["tolerances"] = {{"nonsense", 1.0}};
  EXPECT_EQ(error_path(tol), "/tolerances/nonsense");

  json entries = minimal();
  entries["two_form"] = json::parse(R"({"type": "explicit", "entries": [{"i": 2, "j": 1, "value": "1"}]})");
  EXPECT_EQ(error_path(entries), "/two_form/entries/0");

  EXPECT_THROW(parse_scenario_text("{ not json"), ConfigError);
  EXPECT_THROW(load_scenario("/nonexistent/file.json"), ConfigError);
}

TEST(Config, ToleranceOverrides) {
  json doc = minimal();
  doc["tolerances"] = {{"darboux", 1e-3}};
  EXPECT_EQ(parse_scenario(doc).tolerances.darboux, 1e-3);
}

TEST(Config, ShippedScenariosLoad) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(FINSYM_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 9u);
}

TEST(Suite, ApplicableChecksFollowScenarioBlocks) {
  const ScenarioConfig c = parse_scenario(minimal());
  const auto ids = applicable_checks(c);
  EXPECT_NE(std::find(ids.begin(), ids.end(), "induce"), ids.end());
  EXPECT_NE(std::find(ids.begin(), ids.end(), "darboux"), ids.end());
  EXPECT_EQ(std::find(ids.begin(), ids.end(), "transform"), ids.end());
  EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  EXPECT_THROW(require_checks(c, {"transform"}), ConfigError);
  EXPECT_THROW(require_checks(c, {"no-such-check"}), ConfigError);
  EXPECT_THROW(require_checks(c, {}), ConfigError);
}

TEST(Sampling, GridCoversCellCenters) {
  const auto pts = runner_detail::grid_points(DomainBox::cube(2, 0, 1), 9);
  ASSERT_EQ(pts.size(), 9u);
  EXPECT_DOUBLE_EQ(pts[0][0], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(pts[4][1], 0.5);
  EXPECT_EQ(runner_detail::grid_points(DomainBox::cube(2, 0, 1), 10).size(), 16u);
}

TEST(Sampling, RandomPlanIsSeeded) {
  json doc = minimal();
  doc["sampling"] = {{"mode", "random"}, {"count", 20}, {"seed", 11}, {"y_per_x", 3}};
  const ScenarioConfig c = parse_scenario(doc);
  const auto a = sample_plan(c), b = sample_plan(c);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    ASSERT_EQ(a[i].ys.size(), 3u);
    EXPECT_EQ(a[i].ys, b[i].ys);
    EXPECT_TRUE(c.metric.domain().contains(a[i].x));
    for (const auto& y : a[i].ys) {
      const double r = std::hypot(y[0], y[1]);
      EXPECT_GE(r, 0.5 - 1e-15);
      EXPECT_LE(r, 2.0 + 1e-15);
    }
  }
  doc["sampling"]["seed"] = 12;
  EXPECT_NE(sample_plan(parse_scenario(doc))[0].x, a[0].x);
}

TEST(Run, RecordsAreGroupedByCheckAndDeterministic) {
  const ScenarioConfig c = load_scenario(scenario_file("unimodular-2d"));
  const auto suite = applicable_checks(c);
  const auto a = run_scenario(c, suite);
  const auto b = run_scenario(c, suite, RunOptions{3, false});
  ASSERT_EQ(a.size(), b.size());
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), [](const auto& l, const auto& r) { return l.check < r.check; }));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(record_json(a[i]).dump(), record_json(b[i]).dump());
    EXPECT_EQ(a[i].elapsed.count(), 0);
  }
  EXPECT_TRUE(all_pass(a));
}

TEST(Run, NegativeControlFails) {
  const ScenarioConfig c = load_scenario(scenario_file("randers-2d"));
  const auto recs = run_scenario(c, {"preservation"});
  EXPECT_FALSE(all_pass(recs));
  bool residual_failed = false;
  for (const auto& r : recs)
    if (r.check == "preservation.residual" && !r.pass) residual_failed = true;
  EXPECT_TRUE(residual_failed);
}

TEST(Run, EvaluationErrorsBecomeRecords) {
  json doc = minimal();
  doc["vector_field"]["components"] = {"x1", "x2"};
  doc["sampling"]["count"] = 1;  // the single grid point is the origin, where W vanishes
  const auto recs = run_scenario(parse_scenario(doc), {"induce"});
  ASSERT_FALSE(recs.empty());
  EXPECT_FALSE(all_pass(recs));
  EXPECT_FALSE(recs.front().error.empty());
}

TEST(Report, JsonKeyOrderAndNullError) {
  const CheckRecord r = CheckRecord::evaluate("induce.symmetry", {0.5, -0.25}, 0.0, 0.0);
  EXPECT_EQ(record_json(r).dump(),
            R"({"check":"induce.symmetry","point":[0.5,-0.25],"residual":0.0,"tolerance":0.0,"pass":true,)"
            R"("elapsed_us":0,"error":null})");
  std::ostringstream out;
  emit_report({r, CheckRecord::failure("scenario", {0.0, 0.0}, "boom")}, ReportFormat::json_lines, out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_NE(text.find(R"("error":"boom")"), std::string::npos);
  std::ostringstream table;
  emit_report({r}, ReportFormat::table, table);
  EXPECT_NE(table.str().find("summary"), std::string::npos);
}
