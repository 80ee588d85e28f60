#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "loadbal/experiment.hpp"

using namespace loadbal;
using testing_support::q;

namespace {

SweepConfig small_sweep(Family family) {
  SweepConfig config;
  config.family.family = family;
  config.family.n = 8;
  config.family.speed_max = 16;
  config.m_list = {2, 3, 5};
  config.seeds = {0, 1, 2, 3};
  config.mechanism = MechanismSpec::parse("ppr");
  return config;
}

std::size_t count_char(const std::string& line, char c) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), c));
}

}  // namespace

TEST_CASE("a single cell on the worked-example shape") {
  FamilySpec fs;
  fs.family = Family::Hardness;
  fs.m = 8;
  const auto row = run_cell(fs, MechanismSpec::ppr_with_base(1));
  CHECK(row.m == 8);
  CHECK(row.n == 8);
  REQUIRE(row.ratio.has_value());
  CHECK(*row.ratio == row.alg / row.opt.value);
  CHECK(row.ratio_low <= *row.ratio);
  CHECK(*row.ratio <= row.ratio_high);
  CHECK(row.opt.value <= 1);
  CHECK(row.opt2.value >= row.opt.value);
  REQUIRE(row.wb_strong.has_value());
  CHECK(*row.wb_strong == Verdict::Pass);
}

TEST_CASE("property columns are skipped on request") {
  FamilySpec fs;
  fs.m = 3;
  fs.n = 6;
  CellOptions options;
  options.check_properties = false;
  const auto row = run_cell(fs, MechanismSpec::parse("vcg"), options);
  CHECK_FALSE(row.wb_strong.has_value());
  CHECK_FALSE(row.anonymous.has_value());
  CHECK(row.runtime_ms == 0);
}

TEST_CASE("parallel sweep equals serial sweep") {
  for (Family family : {Family::Random, Family::Unit, Family::Bounded}) {
    const auto config = small_sweep(family);
    const auto serial = sweep(config, Execution::Serial);
    const auto parallel = sweep(config, Execution::Parallel);
    REQUIRE(serial.size() == 12);
    std::ostringstream a, b;
    write_sweep_csv(a, serial);
    write_sweep_csv(b, parallel);
    CHECK(a.str() == b.str());
    for (std::size_t k = 1; k < serial.size(); ++k) {
      CHECK((serial[k - 1].m < serial[k].m ||
             (serial[k - 1].m == serial[k].m && serial[k - 1].seed < serial[k].seed)));
    }
  }
}

TEST_CASE("every CSV line has the header's column count") {
  const auto rows = sweep(small_sweep(Family::Random), Execution::Serial);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  const std::size_t commas = count_char(line, ',');
  CHECK(commas == 26);
  std::size_t cells = 0, summaries = 0;
  while (std::getline(in, line)) {
    CHECK(count_char(line, ',') == commas);
    if (line.rfind("cell,", 0) == 0) ++cells;
    if (line.rfind("summary,", 0) == 0) ++summaries;
  }
  CHECK(cells == 12);
  CHECK(summaries == 3);
}

TEST_CASE("summary statistics") {
  const auto rows = sweep(small_sweep(Family::Unit), Execution::Serial);
  const auto summary = summarize(rows);
  REQUIRE(summary.size() == 3);
  for (const auto& s : summary) {
    CHECK(s.cells == 4);
    Rational max(0), total(0);
    std::size_t exact = 0;
    for (const auto& r : rows) {
      if (r.m != s.m || !r.ratio) continue;
      if (*r.ratio > max) max = *r.ratio;
      total += *r.ratio;
      ++exact;
    }
    CHECK(s.inexact_cells == 4 - exact);
    if (exact > 0) {
      CHECK(*s.max_ratio == max);
      CHECK(*s.mean_ratio == total / Rational(exact));
    }
  }
  CHECK(decimal_string(q("1/3")) == "0.333333333");
}

TEST_CASE("verification suite") {
  SuiteConfig config;
  config.seeds = {0, 1, 2, 3, 4};
  config.mechanism = MechanismSpec::parse("ppr");
  const auto result = run_verify_suite(config);
  CHECK(result.ok());
  CHECK(result.checks > 0);
  CHECK(result.passed + result.inapplicable == result.checks);
  CHECK(result.warnings.empty());

  MechanismSpec mutant = config.mechanism;
  mutant.ppr.gate_speed_classes = false;
  config.mechanism = mutant;
  config.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto broken = run_verify_suite(config);
  CHECK_FALSE(broken.ok());
  for (const auto& f : broken.failures) CHECK(f.counterexample.has_value());

  config.seeds.clear();
  const auto empty = run_verify_suite(config);
  CHECK(empty.ok());
  CHECK(empty.checks == 0);
  CHECK(empty.warnings.size() == 1);
  CHECK(suite_to_json(empty)["verdict"] == "pass");
}
