#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "loadbal/generators.hpp"
#include "loadbal/mechanism.hpp"
#include "loadbal/opt.hpp"
#include "loadbal/verify.hpp"

namespace loadbal {

struct CellOptions {
  OptOptions opt{};
  // Run the well-behavior, fairness and anonymity checks for every cell.
  bool check_properties = true;
  // Wall-clock runtime_ms is reported only when set; otherwise it is 0 so
  // that output stays byte-identical across runs.
  bool timing = false;
};

struct ExperimentRow {
  std::string mechanism;
  Family family = Family::Random;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Rational alg{0};  // makespan on true speeds
  OptResult opt;
  OptResult opt2;   // true speeds rounded down to powers of 2
  // alg / opt when opt is exact; otherwise only the bracket is meaningful.
  std::optional<Rational> ratio;
  Rational ratio_low{0};   // alg / opt.upper_bound
  Rational ratio_high{0};  // alg / opt.lower_bound
  std::optional<Verdict> wb_strong, wb_weak, fair, anonymous;
  double runtime_ms = 0;
};

// Generates the family instance for (spec.m, spec.seed), runs the mechanism
// with the seed's tie-break order and measures it against the optimum.
ExperimentRow run_cell(const FamilySpec& family, const MechanismSpec& mechanism,
                       const CellOptions& options = {});

struct SweepConfig {
  FamilySpec family;  // m and seed are overridden per cell
  std::vector<std::size_t> m_list;
  std::vector<std::uint64_t> seeds;
  MechanismSpec mechanism;
  CellOptions cell;
};

// One row per (m, seed), sorted by (m, seed). The parallel path farms cells
// out to threads; the result is identical to the serial path.
std::vector<ExperimentRow> sweep(const SweepConfig& config,
                                 Execution execution = Execution::Parallel);

struct SweepSummary {
  std::size_t m = 0;
  std::size_t cells = 0;
  std::size_t inexact_cells = 0;  // excluded from max and mean
  std::optional<Rational> max_ratio;
  std::optional<Rational> mean_ratio;
};

std::vector<SweepSummary> summarize(const std::vector<ExperimentRow>& rows);

// Fixed-precision decimal for CSV columns.
std::string decimal_string(const Rational& value);

// Header, one "cell" line per row, then one "summary" line per m.
void write_sweep_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

struct SuiteConfig {
  std::vector<std::uint64_t> seeds;
  std::size_t m_max = 6;  // instances use m = 2 .. m_max
  std::size_t n = 12;
  MechanismSpec mechanism;
  Execution execution = Execution::Parallel;
};

struct SuiteResult {
  std::size_t checks = 0;
  std::size_t passed = 0;
  std::size_t inapplicable = 0;
  std::vector<VerificationReport> failures;  // in seed order
  std::vector<std::string> warnings;

  bool ok() const { return failures.empty(); }
};

// Per seed: random, unit and bounded instances checked for strong
// well-behavior, fairness, anonymity and job truthfulness. For posted-price
// mechanisms also machine monotonicity on the unit instance at base 2 and on
// a two-machine instance at base 4. No seeds is a vacuous pass with a warning.
SuiteResult run_verify_suite(const SuiteConfig& config);

nlohmann::json suite_to_json(const SuiteResult& result);

}  // namespace loadbal
