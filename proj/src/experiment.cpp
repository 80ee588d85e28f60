#include "loadbal/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>

namespace loadbal {

ExperimentRow run_cell(const FamilySpec& family, const MechanismSpec& mechanism,
                       const CellOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Instance instance = generate(family);

  ExperimentRow row;
  row.mechanism = mechanism.name();
  row.family = family.family;
  row.m = instance.machine_count();
  row.n = instance.job_count();
  row.seed = family.seed;

  MechanismSpec quiet = mechanism;
  quiet.ppr.record_trace = false;
  row.alg = run_mechanism(instance, quiet).alg_true;

  row.opt = opt_exact(instance, Rational(1), options.opt);
  row.opt2 = opt_exact(instance, Rational(2), options.opt);
  if (sgn(row.opt.value) > 0) {
    if (row.opt.exact) row.ratio = Rational(row.alg / row.opt.value);
    row.ratio_low = row.alg / row.opt.upper_bound;
    row.ratio_high = row.alg / row.opt.lower_bound;
  }

  if (options.check_properties) {
    row.wb_strong = check_run_well_behaved(instance, quiet, WellBehavedMode::Strong,
                                           SpeedBasis::Announced).verdict;
    row.wb_weak =
        check_run_well_behaved(instance, quiet, WellBehavedMode::Weak, SpeedBasis::True).verdict;
    row.fair = check_run_fairness(instance, quiet).verdict;
    row.anonymous = check_anonymity(instance, quiet, default_permutation(instance)).verdict;
  }
  if (options.timing) {
    row.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }
  return row;
}

std::vector<ExperimentRow> sweep(const SweepConfig& config, Execution execution) {
  std::vector<std::pair<std::size_t, std::uint64_t>> cells;
  for (std::size_t m : config.m_list) {
    for (std::uint64_t seed : config.seeds) cells.emplace_back(m, seed);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  std::vector<ExperimentRow> rows(cells.size());
  for_each_index(cells.size(), execution, [&](std::size_t k) {
    FamilySpec spec = config.family;
    spec.m = cells[k].first;
    spec.seed = cells[k].second;
    rows[k] = run_cell(spec, config.mechanism, config.cell);
  });
  return rows;
}

std::vector<SweepSummary> summarize(const std::vector<ExperimentRow>& rows) {
  std::map<std::size_t, SweepSummary> by_m;
  std::map<std::size_t, Rational> sums;
  for (const auto& row : rows) {
    auto& s = by_m[row.m];
    s.m = row.m;
    ++s.cells;
    if (!row.ratio) {
      ++s.inexact_cells;
      continue;
    }
    if (!s.max_ratio || *row.ratio > *s.max_ratio) s.max_ratio = *row.ratio;
    sums[row.m] += *row.ratio;
  }
  std::vector<SweepSummary> out;
  for (auto& [m, s] : by_m) {
    const std::size_t exact = s.cells - s.inexact_cells;
    if (exact > 0) s.mean_ratio = Rational(sums[m] / static_cast<unsigned long>(exact));
    out.push_back(s);
  }
  return out;
}

std::string decimal_string(const Rational& value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", to_double(value));
  return buf;
}

namespace {

std::string verdict_cell(const std::optional<Verdict>& v) {
  return v ? to_string(*v) : "skipped";
}

std::string opt_cell(const std::optional<Rational>& v, bool decimal) {
  if (!v) return "";
  return decimal ? decimal_string(*v) : to_string(*v);
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "row,mechanism,family,m,n,seed,alg,alg_decimal,opt,opt_decimal,opt_exact,"
         "opt2,opt2_decimal,opt2_exact,ratio,ratio_decimal,ratio_low,ratio_high,"
         "wb_strong,wb_weak,fair,anonymous,runtime_ms,cells,inexact_cells,max_ratio,"
         "mean_ratio\n";
  for (const auto& r : rows) {
    char runtime[32];
    std::snprintf(runtime, sizeof runtime, "%.3f", r.runtime_ms);
    out << "cell," << r.mechanism << ',' << to_string(r.family) << ',' << r.m << ',' << r.n
        << ',' << r.seed << ',' << to_string(r.alg) << ',' << decimal_string(r.alg) << ','
        << to_string(r.opt.value) << ',' << decimal_string(r.opt.value) << ','
        << (r.opt.exact ? "true" : "false") << ',' << to_string(r.opt2.value) << ','
        << decimal_string(r.opt2.value) << ',' << (r.opt2.exact ? "true" : "false") << ','
        << opt_cell(r.ratio, false) << ',' << opt_cell(r.ratio, true) << ','
        << decimal_string(r.ratio_low) << ',' << decimal_string(r.ratio_high) << ','
        << verdict_cell(r.wb_strong) << ',' << verdict_cell(r.wb_weak) << ','
        << verdict_cell(r.fair) << ',' << verdict_cell(r.anonymous) << ',' << runtime
        << ",,,,\n";
  }
  const std::string mechanism = rows.empty() ? "" : rows.front().mechanism;
  const std::string family = rows.empty() ? "" : to_string(rows.front().family);
  for (const auto& s : summarize(rows)) {
    out << "summary," << mechanism << ',' << family << ',' << s.m
        << ",,,,,,,,,,,,,,,,,,,," << s.cells << ',' << s.inexact_cells << ','
        << opt_cell(s.max_ratio, true) << ',' << opt_cell(s.mean_ratio, true) << '\n';
  }
}

namespace {

struct SeedResult {
  std::size_t checks = 0, passed = 0, inapplicable = 0;
  std::vector<VerificationReport> failures;

  void add(VerificationReport report) {
    ++checks;
    if (report.verdict == Verdict::Pass) ++passed;
    if (report.verdict == Verdict::Inapplicable) ++inapplicable;
    if (report.failed()) failures.push_back(std::move(report));
  }
};

SeedResult suite_seed(const SuiteConfig& config, std::uint64_t seed) {
  SeedResult out;
  FamilySpec spec;
  spec.m = 2 + seed % (std::max<std::size_t>(config.m_max, 2) - 1);
  spec.n = config.n;
  spec.seed = seed;
  spec.speed_max = 8;  // small speed range so equal-speed groups are common
  for (Family family : {Family::Random, Family::Unit, Family::Bounded}) {
    spec.family = family;
    const Instance instance = generate(spec);
    for (Property p : {Property::WbStrong, Property::Fair, Property::Anon, Property::TruthJob}) {
      out.add(verify_property(instance, config.mechanism, p));
    }
  }
  if (config.mechanism.kind != MechanismKind::Ppr) return out;

  MechanismSpec base2 = config.mechanism;
  base2.ppr.rounding_base = 2;
  spec.family = Family::Unit;
  out.add(verify_property(generate(spec), base2, Property::MonoMachine));

  MechanismSpec base4 = config.mechanism;
  base4.ppr.rounding_base = 4;
  spec.family = Family::Random;
  spec.m = 2;
  spec.raw_speeds = true;
  out.add(verify_property(generate(spec), base4, Property::MonoMachine));
  return out;
}

}  // namespace

SuiteResult run_verify_suite(const SuiteConfig& config) {
  SuiteResult result;
  if (config.seeds.empty()) {
    result.warnings.push_back("no seeds configured; nothing was checked");
    return result;
  }
  std::vector<SeedResult> per_seed(config.seeds.size());
  for_each_index(config.seeds.size(), config.execution, [&](std::size_t k) {
    per_seed[k] = suite_seed(config, config.seeds[k]);
  });
  for (auto& s : per_seed) {
    result.checks += s.checks;
    result.passed += s.passed;
    result.inapplicable += s.inapplicable;
    for (auto& f : s.failures) result.failures.push_back(std::move(f));
  }
  return result;
}

nlohmann::json suite_to_json(const SuiteResult& result) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) failures.push_back(report_to_json(f));
  return nlohmann::json{{"schema_version", 1},
                        {"verdict", result.ok() ? "pass" : "fail"},
                        {"checks", result.checks},
                        {"passed", result.passed},
                        {"inapplicable", result.inapplicable},
                        {"failures", failures},
                        {"warnings", result.warnings}};
}

}  // namespace loadbal
