#include <set>

#include "bklab/errors.hpp"
#include "bklab/harness.hpp"
#include "doctest.h"

using namespace bklab;

namespace {

SuiteConfig config(std::vector<std::string> fields, std::string suite, std::vector<int> qs = {1, 2}) {
  SuiteConfig c;
  c.fields = std::move(fields);
  c.suite = std::move(suite);
  c.qs = std::move(qs);
  return c;
}

const GradedTable& table_for(const CheckReport& r, const std::string& field, int q) {
  for (const auto& t : r.tables)
    if (t.field == field && t.q == q) return t;
  throw std::runtime_error("no table");
}

}  // namespace

TEST_CASE("configuration errors come before any check") {
  CHECK_THROWS_AS(run_suite(config({}, "all")), math_error);
  CHECK_THROWS_AS(run_suite(config({"Q2"}, "nonsense")), math_error);
  CHECK_THROWS_AS(run_suite(config({"Q2"}, "all", {3})), math_error);
  CHECK_THROWS_AS(run_suite(config({"Q2"}, "all", {})), math_error);
  CHECK_THROWS(run_suite(config({"Q2", "no_such_field"}, "all")));
}

TEST_CASE("Q2 proposition tables") {
  const auto r = run_suite(config({"Q2"}, "proposition"));
  CHECK(r.exit_code() == 0);
  const auto& t1 = table_for(r, "Q2", 1);
  CHECK(t1.model_dims.size() == 4);
  CHECK(t1.observed_dims == std::vector<int>{1, 1, 1, 0});
  CHECK(t1.model_dims == t1.observed_dims);
  const auto& t2 = table_for(r, "Q2", 2);
  CHECK(t2.observed_dims == std::vector<int>{0, 0, 1, 0});
  bool witness = false;
  for (const auto& rec : r.records)
    if (rec.clause == "p_brauer_witness") {
      witness = true;
      CHECK(rec.status == CheckStatus::pass);
      CHECK(rec.evidence.at("value") == "zeta^1");
      CHECK(rec.evidence.at("level") == 2);
    }
  CHECK(witness);

  const auto text = emit_report(r, ReportFormat::text);
  // Title, column header and exactly four data rows for q = 1, then the q = 2 table.
  const auto at = text.find("q=1\n");
  REQUIRE(at != std::string::npos);
  std::size_t pos = at;
  for (int i = 0; i < 6; ++i) pos = text.find('\n', pos) + 1;
  const auto block = text.substr(at, pos - at);
  CHECK(block.find("     0        1         1  pass") != std::string::npos);
  CHECK(block.find("     3        0         0  pass") != std::string::npos);
  CHECK(text.substr(pos, 4) == "q=2\n");
}

TEST_CASE("every clause appears once per field and degree with evidence") {
  const std::vector<std::string> names{"Q2", "Q3", "Q2_sqrt2", "Q3_zeta3", "Q5"};
  const auto r = run_suite(config(names, "proposition"));
  for (const auto& f : names)
    for (int q : {1, 2}) {
      std::multiset<std::string> seen;
      for (const auto& rec : r.records)
        if (rec.field == f && rec.q == q) {
          seen.insert(rec.clause);
          CHECK_FALSE(rec.evidence.empty());
        }
      for (const auto& c : seen) CHECK_MESSAGE(seen.count(c) == 1, f, " q=", q, " ", c);
      for (auto c : {"dimension", "engine_matches_model", "vanishing_above_eprime", "total_dimension"})
        CHECK_MESSAGE(seen.count(c) == 1, f, " q=", q, " ", c);
    }
}

TEST_CASE("no pass on an empty sample set") {
  const auto r = run_suite(config({"Q2", "Q3_zeta3", "Q5"}, "all"));
  CHECK(r.exit_code() == 0);
  CHECK(r.count(CheckStatus::fail) == 0);
  for (const auto& rec : r.records) {
    if (rec.status != CheckStatus::pass) continue;
    for (auto key : {"samples", "pairs"})
      if (rec.evidence.contains(key)) CHECK_MESSAGE(rec.evidence.at(key).get<std::size_t>() > 0, rec.clause);
  }
}

TEST_CASE("structured output is a pure function of configuration and seed") {
  auto cfg = config({"Q2", "Q3_zeta3"}, "all");
  cfg.seed = 17;
  const auto a = emit_report(run_suite(cfg), ReportFormat::structured);
  const auto b = emit_report(run_suite(cfg), ReportFormat::structured);
  CHECK(a == b);
  const auto doc = nlohmann::ordered_json::parse(a);
  CHECK(doc.at("seed") == 17);
  CHECK(doc.at("tool") == "bklab");
  CHECK(doc.at("version") == kVersion);
  CHECK(doc.begin().key() == "tool");
  CHECK(doc.at("fields").size() == 2);
  CHECK(a.find("millis") == std::string::npos);
}

TEST_CASE("failing and undecided records") {
  CheckReport r;
  r.config = config({"Q2"}, "all");
  CheckRecord ok;
  ok.field = "Q2";
  ok.suite = "proposition";
  ok.clause = "dimension";
  ok.q = 1;
  ok.status = CheckStatus::pass;
  ok.evidence = {{"levels", 4}};
  r.records.push_back(ok);
  CHECK(r.exit_code() == 0);
  auto undecided = ok;
  undecided.status = CheckStatus::undecided;
  undecided.evidence = {{"error", "undecided at precision 7"}, {"hint", "raise --precision"}};
  r.records.push_back(undecided);
  CHECK(r.exit_code() == 2);
  auto bad = ok;
  bad.status = CheckStatus::fail;
  bad.evidence = {{"witness", "{1 + pi^2, pi}"}, {"audit", {"step one", "step two"}}};
  r.records.push_back(bad);
  CHECK(r.exit_code() == 1);
  const auto text = emit_report(r, ReportFormat::text);
  CHECK(text.find("[FAIL] proposition.dimension q=1") != std::string::npos);
  CHECK(text.find("{1 + pi^2, pi}") != std::string::npos);
  CHECK(text.find("step two") != std::string::npos);
  CHECK(text.find("[UNDECIDED]") != std::string::npos);
  CHECK(text.find("1 pass, 1 fail, 1 undecided") != std::string::npos);
}
