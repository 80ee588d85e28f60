// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "loadbal/experiment.hpp"
#include "loadbal/payments.hpp"
#include "loadbal/verify.hpp"
#include "oracles.hpp"

using namespace loadbal;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

Rational r(const char* text) { return parse_rational(text); }

std::vector<Rational> rs(std::initializer_list<const char*> texts) {
  std::vector<Rational> out;
  for (auto t : texts) out.push_back(r(t));
  return out;
}

std::vector<ExtendedRational> ext(std::initializer_list<const char*> texts) {
  std::vector<ExtendedRational> out;
  for (auto t : texts) out.emplace_back(r(t));
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Rows shared by criteria 4 and 11.
std::vector<ExperimentRow> g_ratio_pool;

FamilySpec pool_spec(std::size_t m, std::uint64_t seed, std::size_t n) {
  FamilySpec fs;
  fs.family = Family::Random;
  fs.m = m;
  fs.n = n;
  fs.seed = seed;
  return fs;
}

std::size_t pool_jobs(std::size_t m, std::uint64_t seed) { return seed < 100 ? 16 : 4 * m; }

void golden_trace(Outcome& o) {
  const Instance instance = Instance::from_values(rs({"1", "2", "4"}), rs({"6", "4", "1", "3/5"}));
  const auto outcome = run_mechanism(instance, MechanismSpec::parse("ppr"));
  const std::vector<std::size_t> expected_machine{2, 2, 1, 1};
  const std::vector<std::vector<ExtendedRational>> expected_prices{
      ext({"0", "0", "0"}), ext({"3/4", "3/4", "0"}), ext({"5/4", "5/4", "0"}),
      ext({"5/4", "1", "0"})};
  o.require(outcome.steps.size() == 4, "four steps");
  for (std::size_t k = 0; k < outcome.steps.size() && k < 4; ++k) {
    o.require(outcome.steps[k].chosen.index == expected_machine[k], "assignment " + std::to_string(k));
    o.require(outcome.steps[k].prices == expected_prices[k], "prices " + std::to_string(k));
  }
  std::vector<Rational> makespans;
  for (const auto& m : outcome.state.machines()) makespans.push_back(m.makespan);
  o.require(makespans == rs({"0", "4/5", "5/2"}), "final makespans");
  o.note << "assignments (m3, m3, m2, m2), final makespans (0, 4/5, 5/2)";
}

void well_behavior(Outcome& o) {
  const Family families[] = {Family::Random, Family::Bounded, Family::Unit};
  std::size_t failures = 0, steps = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    FamilySpec fs;
    fs.family = families[seed % 3];
    fs.m = 1 + seed % 32;
    fs.n = 1 + (seed * 7919) % 200;
    fs.seed = seed;
    fs.raw_speeds = seed % 2 == 1;
    fs.speed_max = 64;
    fs.p_min = 1;
    fs.p_max = 16;
    const Instance instance = generate(fs);
    steps += instance.job_count();
    const auto report = check_run_well_behaved(instance, MechanismSpec::parse("ppr"),
                                               WellBehavedMode::Strong, SpeedBasis::Announced);
    if (report.failed()) ++failures;
  }
  o.require(failures == 0, std::to_string(failures) + " failing instances");
  o.note << "1000 instances, " << steps << " assignments checked, " << failures << " failures";
}

void hardness(Outcome& o) {
  MechanismSpec spec = MechanismSpec::ppr_with_base(1);
  spec.ppr.record_trace = false;
  for (std::size_t m : {16u, 64u, 256u, 1024u}) {
    const Instance instance = gen_hardness(m);
    const auto outcome = run_mechanism(instance, spec);
    const double alg = outcome.alg_true.get_d();
    o.require(alg >= 0.5 * std::sqrt(static_cast<double>(m)),
              "makespan below 0.5 sqrt(m) at m=" + std::to_string(m));
    std::vector<MachineId> identity;
    for (std::size_t i = 0; i < m; ++i) identity.push_back(MachineId{i});
    const Rational opt_upper = schedule_makespan(instance, oracle::true_speeds(instance), identity);
    o.require(opt_upper <= 1, "identity witness above 1");

    // Machines are indexed in increasing speed; job counts on loaded
    // machines must be strictly increasing after every assignment.
    std::vector<std::size_t> count(m, 0);
    bool increasing = true;
    for (const auto& rec : outcome.state.log()) {
      ++count[rec.machine.index];
      std::size_t previous = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (count[i] == 0) continue;
        if (count[i] <= previous) increasing = false;
        previous = count[i];
      }
    }
    o.require(increasing, "job counts not strictly increasing at m=" + std::to_string(m));
    char buf[96];
    std::snprintf(buf, sizeof buf, "m=%zu ALG=%.4f (0.5 sqrt m=%.2f, OPT<=%s); ", m, alg,
                  0.5 * std::sqrt(static_cast<double>(m)), to_string(opt_upper).c_str());
    o.note << buf;
  }
}

void ratio_bound(Outcome& o) {
  SweepConfig config;
  config.family = pool_spec(2, 0, 16);
  config.mechanism = MechanismSpec::parse("ppr");
  config.cell.check_properties = false;
  g_ratio_pool.clear();
  for (std::size_t m : {2u, 4u, 8u, 16u, 32u, 64u}) {
    std::size_t exact = 0, certified = 0, excluded = 0;
    Rational worst(0);
    const double bound = 2.0 * (4.0 * std::log2(static_cast<double>(m)) + 3.0);
    const Rational bound_q(static_cast<long>(std::lround(bound)));
    for (bool small : {true, false}) {
      config.m_list = {m};
      config.seeds.clear();
      for (std::uint64_t s = small ? 0 : 100; s < (small ? 100u : 200u); ++s) config.seeds.push_back(s);
      config.family.n = pool_jobs(m, config.seeds.front());
      for (auto& row : sweep(config)) {
        if (row.ratio) {
          ++exact;
          if (*row.ratio > worst) worst = *row.ratio;
          o.require(*row.ratio <= bound_q, "ratio above bound at m=" + std::to_string(m));
        } else if (row.ratio_high <= bound_q) {
          ++certified;
        } else {
          ++excluded;
        }
        g_ratio_pool.push_back(std::move(row));
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "m=%zu bound=%.0f max=%.4f exact=%zu lb-certified=%zu excluded=%zu; ",
                  m, bound, worst.get_d(), exact, certified, excluded);
    o.note << buf;
  }
}

void bounded_sizes(Outcome& o) {
  SweepConfig config;
  config.family.family = Family::Unit;
  config.mechanism = MechanismSpec::parse("ppr");
  config.cell.check_properties = false;
  for (std::size_t m = 2; m <= 64; ++m) config.m_list.push_back(m);
  Rational worst(0);
  std::size_t cells = 0, inexact = 0;
  for (std::size_t factor : {1u, 3u, 8u}) {
    for (std::size_t m : config.m_list) {
      SweepConfig one = config;
      one.m_list = {m};
      one.family.n = factor * m;
      one.seeds = {0, 1, 2, 3, 4};
      for (const auto& row : sweep(one)) {
        ++cells;
        if (!row.ratio) {
          ++inexact;
          continue;
        }
        if (*row.ratio > worst) worst = *row.ratio;
      }
    }
  }
  o.require(worst <= 12, "ratio above 12");
  o.require(inexact == 0, "inexact optimum on unit jobs");
  o.note << cells << " cells, m=2..64, max ratio " << worst.get_d() << " (" << to_string(worst) << ")";
}

void sandwich(Outcome& o) {
  std::size_t both = 0, violations = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    FamilySpec fs;
    fs.family = seed % 2 ? Family::Random : Family::Bounded;
    fs.m = 1 + seed % 6;
    fs.n = 1 + seed % 11;
    fs.seed = seed;
    fs.raw_speeds = true;
    fs.speed_max = 16;
    fs.p_max = 16;
    const Instance instance = generate(fs);
    const auto s = opt2_sandwich(instance, Rational(2));
    if (!s.opt.exact || !s.opt_rounded.exact) continue;
    ++both;
    if (!(s.opt.value <= s.opt_rounded.value && s.opt_rounded.value <= 2 * s.opt.value)) {
      ++violations;
    }
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.require(both > 0, "no exact pairs");
  o.note << both << " exact pairs, " << violations << " violations";
}

void oracle_equivalence(Outcome& o) {
  std::size_t mismatches = 0, inexact = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    FamilySpec fs;
    const Family families[] = {Family::Random, Family::Bounded, Family::Unit};
    fs.family = families[seed % 3];
    fs.m = 1 + seed % 4;
    fs.n = 1 + (seed / 4) % 6;
    fs.seed = seed;
    fs.raw_speeds = seed % 2 == 0;
    fs.speed_max = 8;
    fs.p_max = 32;
    const Instance instance = generate(fs);
    const auto result = opt_exact(instance);
    if (!result.exact) ++inexact;
    if (result.value != oracle::brute_force_opt(instance, oracle::true_speeds(instance))) {
      ++mismatches;
    }
  }
  o.require(mismatches == 0 && inexact == 0, std::to_string(mismatches) + " mismatches");
  o.note << "500 instances, " << mismatches << " mismatches";
}

void job_truthfulness(Outcome& o) {
  std::size_t scans = 0, failures = 0;
  for (const char* name : {"ppr", "vcg", "greedy-identical"}) {
    const auto spec = MechanismSpec::parse(name);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      FamilySpec fs;
      fs.family = seed % 2 ? Family::Random : Family::Bounded;
      fs.m = 1 + seed % 8;
      fs.n = 1 + seed % 12;
      fs.seed = seed;
      fs.raw_speeds = seed % 3 == 0;
      fs.speed_max = 16;
      const Instance instance = generate(fs);
      for (std::size_t j = 0; j < instance.job_count(); ++j) {
        ++scans;
        const auto report = scan_job_truthfulness(instance, spec, j,
                                                  default_misreport_grid(instance, j),
                                                  Execution::Parallel);
        if (report.failed()) ++failures;
      }
    }
  }
  o.require(failures == 0, std::to_string(failures) + " failing scans");
  o.note << scans << " job scans over 3 mechanisms, " << failures << " failures";
}

struct CurveCase {
  Instance instance;
  MechanismSpec spec;
  std::size_t machine;
  WorkloadCurve curve;
};

std::vector<CurveCase> g_curves;

void machine_monotonicity(Outcome& o) {
  g_curves.clear();
  std::size_t scans = 0, failures = 0, curve_failures = 0;
  auto check = [&](const Instance& instance, const MechanismSpec& spec) {
    const auto grid = default_bid_grid(instance, spec);
    for (std::size_t i = 0; i < instance.machine_count(); ++i) {
      ++scans;
      if (scan_machine_monotonicity(instance, spec, MachineId{i}, grid, Execution::Parallel)
              .failed()) {
        ++failures;
      }
      CurveOptions options;
      options.execution = Execution::Parallel;
      WorkloadCurve curve = workload_curve(instance, spec, MachineId{i}, options);
      if (!curve.is_non_increasing()) ++curve_failures;
      g_curves.push_back({instance, spec, i, std::move(curve)});
    }
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    FamilySpec fs;
    fs.family = Family::Unit;
    fs.m = 1 + seed % 8;
    fs.n = 1 + (seed * 13) % 40;
    fs.seed = seed;
    fs.raw_speeds = seed % 2 == 1;
    fs.speed_max = 16;
    check(generate(fs), MechanismSpec::ppr_with_base(2));
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    FamilySpec fs;
    fs.family = seed % 2 ? Family::Random : Family::Bounded;
    fs.m = 2;
    fs.n = 1 + (seed * 7) % 30;
    fs.seed = seed;
    fs.raw_speeds = true;
    fs.speed_max = 64;
    check(generate(fs), MechanismSpec::ppr_with_base(4));
  }
  o.require(failures == 0, std::to_string(failures) + " failing grid scans");
  o.require(curve_failures == 0, std::to_string(curve_failures) + " increasing curves");
  o.note << scans << " machine scans (unit m<=8 base 2; m=2 base 4), " << failures
         << " grid failures, " << curve_failures << " curve failures";
}

void payment_truthfulness(Outcome& o) {
  std::size_t curves = 0, comparisons = 0, failures = 0;
  for (const auto& c : g_curves) {
    if (!c.curve.is_non_increasing()) continue;
    ++curves;
    const Rational b_true = 1 / c.instance.machines[c.machine].true_speed;
    const Rational truthful = utility(c.curve, b_true, b_true);
    for (const auto& b : c.curve.breakpoints()) {
      ++comparisons;
      if (utility(c.curve, b, b_true) > truthful) ++failures;
    }
    for (const auto& row : payment_table(c.curve)) {
      ++comparisons;
      if (row.utility_best_lie > row.utility_truth) ++failures;
    }
  }
  o.require(curves > 0, "no curves");
  o.require(failures == 0, std::to_string(failures) + " profitable lies");
  o.note << curves << " curves, " << comparisons << " comparisons, " << failures
         << " profitable lies";
}

void baseline_bounds(Outcome& o) {
  std::size_t cells = 0, violations = 0;
  Rational worst_vcg(0), worst_greedy(0);
  for (const auto& row : g_ratio_pool) {
    if (!row.opt.exact) continue;
    ++cells;
    const Instance instance = generate(pool_spec(row.m, row.seed, row.n));
    Rational smin = instance.machines[0].true_speed, smax = smin;
    for (const auto& m : instance.machines) {
      if (m.true_speed < smin) smin = m.true_speed;
      if (m.true_speed > smax) smax = m.true_speed;
    }
    const Rational vcg = run_mechanism(instance, MechanismSpec::parse("vcg")).alg_true / row.opt.value;
    const Rational greedy =
        run_mechanism(instance, MechanismSpec::parse("greedy-identical")).alg_true / row.opt.value;
    if (vcg > Rational(static_cast<long>(row.m))) ++violations;
    if (greedy > 2 * smax / smin) ++violations;
    if (vcg > worst_vcg) worst_vcg = vcg;
    if (greedy > worst_greedy) worst_greedy = greedy;
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.note << cells << " exact cells, max VCG ratio " << worst_vcg.get_d()
         << ", max GreedyIdentical ratio " << worst_greedy.get_d();
}

void counterexample_sensitivity(Outcome& o) {
  for (const char* eps : {"1/2", "1/4", "1/8"}) {
    const Rational e = r(eps);
    const auto report = check_run_well_behaved(gen_greedy_counter(e), MechanismSpec::parse("greedy-true"),
                                               WellBehavedMode::Weak, SpeedBasis::True);
    o.require(report.failed(), std::string("no failure at eps=") + eps);
    if (!report.failed()) continue;
    const auto& witness = (*report.counterexample)["witness"];
    o.require(witness["slower"]["workload"] == to_string(1 / e) &&
                  witness["faster"]["workload"] == "1",
              std::string("witness workloads at eps=") + eps);
    o.require(replay_counterexample(*report.counterexample).failed(),
              std::string("replay at eps=") + eps);
    o.note << "eps=" << eps << " W=(" << witness["slower"]["workload"].get<std::string>() << ", "
           << witness["faster"]["workload"].get<std::string>() << ") replayed; ";
  }
}

void fairness_anonymity(Outcome& o) {
  std::size_t fair_fail = 0, anon_fail = 0, fair_checked = 0;
  const auto spec = MechanismSpec::parse("ppr");
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    FamilySpec fs;
    const Family families[] = {Family::Random, Family::Bounded, Family::Unit};
    fs.family = families[seed % 3];
    fs.m = 4 + seed % 9;
    fs.n = 1 + (seed * 11) % 60;
    fs.seed = seed;
    fs.speed_max = 4;
    const Instance instance = generate(fs);
    const auto fair = check_run_fairness(instance, spec);
    if (fair.failed()) ++fair_fail;
    if (fair.verdict == Verdict::Pass) ++fair_checked;
    if (check_anonymity(instance, spec, default_permutation(instance)).failed()) ++anon_fail;
  }
  o.require(fair_fail == 0 && anon_fail == 0, "fairness or anonymity failure");
  o.require(fair_checked > 0, "no equal-speed groups");
  o.note << "500 instances (" << fair_checked << " with equal-speed groups), fairness failures "
         << fair_fail << ", anonymity failures " << anon_fail;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: none
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "golden trace", 1, golden_trace},
      {2, "well-behavior after every assignment", 120, well_behavior},
      {3, "hardness family", 60, hardness},
      {4, "ratio bound", 600, ratio_bound},
      {5, "bounded sizes", 0, bounded_sizes},
      {6, "OPT sandwich", 0, sandwich},
      {7, "exact optimum equals enumeration", 0, oracle_equivalence},
      {8, "job truthfulness", 0, job_truthfulness},
      {9, "machine monotonicity", 0, machine_monotonicity},
      {10, "payment truthfulness", 0, payment_truthfulness},
      {11, "baseline bounds", 0, baseline_bounds},
      {12, "counterexample sensitivity", 0, counterexample_sensitivity},
      {13, "fairness and anonymity", 0, fairness_anonymity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(start);
    if (c.budget_seconds > 0) {
      o.require(elapsed < c.budget_seconds, "time budget exceeded");
    }
    if (!o.pass) ++failed;
    std::printf("%s C%d %s [%.2fs]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, elapsed,
                o.note.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
