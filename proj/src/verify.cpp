#include "loadbal/verify.hpp"

#include <algorithm>
#include <numeric>

#include "loadbal/error.hpp"
#include "loadbal/instance_json.hpp"

namespace loadbal {

using nlohmann::json;

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inapplicable: return "inapplicable";
  }
  return "unknown";
}

std::string to_string(Property property) {
  switch (property) {
    case Property::WbStrong: return "wb-strong";
    case Property::WbWeak: return "wb-weak";
    case Property::Fair: return "fair";
    case Property::Anon: return "anon";
    case Property::MonoMachine: return "mono-machine";
    case Property::TruthJob: return "truth-job";
  }
  return "unknown";
}

Property parse_property(std::string_view text) {
  for (Property p : {Property::WbStrong, Property::WbWeak, Property::Fair, Property::Anon,
                     Property::MonoMachine, Property::TruthJob}) {
    if (text == to_string(p)) return p;
  }
  throw InvalidInput("unknown property \"" + std::string(text) + "\"");
}

std::string to_string(SpeedBasis basis) {
  return basis == SpeedBasis::Announced ? "announced" : "true";
}

SpeedBasis parse_speed_basis(std::string_view text) {
  if (text == "announced") return SpeedBasis::Announced;
  if (text == "true") return SpeedBasis::True;
  throw InvalidInput("unknown speed basis \"" + std::string(text) + "\"");
}

json report_to_json(const VerificationReport& report) {
  json out{{"property", report.property}, {"verdict", to_string(report.verdict)},
           {"detail", report.detail}};
  out["counterexample"] = report.counterexample ? *report.counterexample : json(nullptr);
  return out;
}

namespace {

const Rational& speed_of(const MachineLoad& load, SpeedBasis basis) {
  return basis == SpeedBasis::Announced ? load.announced_speed : load.true_speed;
}

std::string property_name(WellBehavedMode mode) {
  return mode == WellBehavedMode::Strong ? "wb-strong" : "wb-weak";
}

// Machine ids in ascending speed; fixed for a whole run.
std::vector<std::size_t> by_speed(const ScheduleState& state, SpeedBasis basis) {
  std::vector<std::size_t> ids(state.machine_count());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return speed_of(state.machines()[a], basis) < speed_of(state.machines()[b], basis);
  });
  return ids;
}

struct WbViolation {
  std::size_t slower;
  std::size_t faster;
};

// Walks speed classes in ascending order keeping the largest value seen in
// any strictly slower class; a violation is a faster machine below it.
std::optional<WbViolation> first_wb_violation(const ScheduleState& state,
                                              const std::vector<std::size_t>& sorted,
                                              WellBehavedMode mode, SpeedBasis basis) {
  auto value = [&](std::size_t i) -> Rational {
    const auto& m = state.machines()[i];
    if (mode == WellBehavedMode::Weak) return m.workload;
    return m.workload / speed_of(m, basis);
  };
  std::optional<std::size_t> best_slower;
  Rational best_value;
  std::size_t k = 0;
  while (k < sorted.size()) {
    std::size_t end = k;
    const Rational& s = speed_of(state.machines()[sorted[k]], basis);
    while (end < sorted.size() && speed_of(state.machines()[sorted[end]], basis) == s) ++end;
    if (best_slower) {
      for (std::size_t t = k; t < end; ++t) {
        if (value(sorted[t]) < best_value) return WbViolation{*best_slower, sorted[t]};
      }
    }
    for (std::size_t t = k; t < end; ++t) {
      Rational v = value(sorted[t]);
      if (!best_slower || v > best_value) {
        best_slower = sorted[t];
        best_value = v;
      }
    }
    k = end;
  }
  return std::nullopt;
}

json wb_witness(const ScheduleState& state, const WbViolation& v, WellBehavedMode mode,
                SpeedBasis basis) {
  auto side = [&](std::size_t i) {
    const auto& m = state.machines()[i];
    return json{{"machine", i},
                {"speed", rational_json(speed_of(m, basis))},
                {"workload", rational_json(m.workload)},
                {"makespan", rational_json(Rational(m.workload / speed_of(m, basis)))}};
  };
  return json{{"property", property_name(mode)},
              {"basis", to_string(basis)},
              {"slower", side(v.slower)},
              {"faster", side(v.faster)}};
}

struct FairViolation {
  std::size_t low;   // W_low < W_high - last(high)
  std::size_t high;
};

std::optional<FairViolation> first_fair_violation(const ScheduleState& state,
                                                  bool& any_pair) {
  const auto machines = state.machines();
  const std::size_t m = machines.size();
  for (std::size_t high = 0; high < m; ++high) {
    Rational slack = machines[high].workload;
    if (auto last = state.last_assignment(MachineId{high})) {
      slack -= state.log()[*last].reported_size;
    }
    for (std::size_t low = 0; low < m; ++low) {
      if (low == high || machines[low].announced_speed != machines[high].announced_speed) continue;
      any_pair = true;
      if (machines[low].workload < slack) return FairViolation{low, high};
    }
  }
  return std::nullopt;
}

json fair_witness(const ScheduleState& state, const FairViolation& v) {
  const auto& lo = state.machines()[v.low];
  const auto& hi = state.machines()[v.high];
  Rational last = state.log()[*state.last_assignment(MachineId{v.high})].reported_size;
  return json{{"property", "fair"},
              {"low", {{"machine", v.low}, {"workload", rational_json(lo.workload)}}},
              {"high",
               {{"machine", v.high},
                {"workload", rational_json(hi.workload)},
                {"last_job", rational_json(last)}}},
              {"speed", rational_json(lo.announced_speed)}};
}

MechanismOutcome quiet_run(const Instance& instance, const MechanismSpec& mechanism,
                           const TieBreakOrder& order) {
  MechanismSpec quiet = mechanism;
  quiet.ppr.record_trace = false;
  return run_mechanism(instance, quiet, order);
}

MechanismOutcome quiet_run(const Instance& instance, const MechanismSpec& mechanism) {
  return quiet_run(instance, mechanism, fixed_ordering(instance.seed, instance.machine_count()));
}

ScheduleState empty_like(const ScheduleState& state) {
  std::vector<Rational> announced, truth;
  for (const auto& m : state.machines()) {
    announced.push_back(m.announced_speed);
    truth.push_back(m.true_speed);
  }
  return ScheduleState(std::move(announced), std::move(truth));
}

Job job_of(const AssignmentRecord& r) { return Job{r.true_size, r.reported_size}; }

json run_header(const char* property, const Instance& instance, const MechanismSpec& mechanism) {
  return json{{"property", property},
              {"instance", instance_to_json(instance)},
              {"mechanism", mechanism_json(mechanism)}};
}

json rationals_json(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(rational_json(v));
  return out;
}

std::vector<Rational> rationals_from_json(const json& values, std::string_view where) {
  std::vector<Rational> out;
  for (const auto& v : values) out.push_back(rational_from_json(v, where));
  return out;
}

void sort_unique(std::vector<Rational>& values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
}

}  // namespace

VerificationReport check_well_behaved(const ScheduleState& state, WellBehavedMode mode,
                                      SpeedBasis basis) {
  VerificationReport report{property_name(mode), Verdict::Pass, "", std::nullopt};
  auto v = first_wb_violation(state, by_speed(state, basis), mode, basis);
  if (v) {
    report.verdict = Verdict::Fail;
    report.detail = "machine " + std::to_string(v->faster) + " is faster than machine " +
                    std::to_string(v->slower) + " but less loaded";
    report.counterexample = wb_witness(state, *v, mode, basis);
  }
  return report;
}

VerificationReport check_fairness(const ScheduleState& state) {
  VerificationReport report{"fair", Verdict::Pass, "", std::nullopt};
  bool any_pair = false;
  auto v = first_fair_violation(state, any_pair);
  if (v) {
    report.verdict = Verdict::Fail;
    report.detail = "machine " + std::to_string(v->low) + " trails machine " +
                    std::to_string(v->high) + " by more than its last job";
    report.counterexample = fair_witness(state, *v);
  } else if (!any_pair) {
    report.verdict = Verdict::Inapplicable;
    report.detail = "no two machines share an announced speed";
  }
  return report;
}

VerificationReport check_run_well_behaved(const Instance& instance, const MechanismSpec& mechanism,
                                          WellBehavedMode mode, SpeedBasis basis) {
  VerificationReport report{property_name(mode), Verdict::Pass, "", std::nullopt};
  MechanismOutcome outcome = quiet_run(instance, mechanism);
  ScheduleState state = empty_like(outcome.state);
  const auto sorted = by_speed(state, basis);
  for (const auto& rec : outcome.state.log()) {
    state.assign(rec.job, job_of(rec), rec.machine, rec.charge);
    if (auto v = first_wb_violation(state, sorted, mode, basis)) {
      report.verdict = Verdict::Fail;
      report.detail = "violated after job " + std::to_string(rec.job);
      json cx = run_header(report.property.c_str(), instance, mechanism);
      cx["args"] = {{"basis", to_string(basis)}};
      cx["step"] = rec.job;
      cx["witness"] = wb_witness(state, *v, mode, basis);
      report.counterexample = std::move(cx);
      return report;
    }
  }
  report.detail = "held after all " + std::to_string(instance.job_count()) + " assignments";
  return report;
}

VerificationReport check_run_fairness(const Instance& instance, const MechanismSpec& mechanism) {
  VerificationReport report{"fair", Verdict::Pass, "", std::nullopt};
  MechanismOutcome outcome = quiet_run(instance, mechanism);
  ScheduleState state = empty_like(outcome.state);
  bool any_pair = false;
  first_fair_violation(state, any_pair);
  if (!any_pair) {
    report.verdict = Verdict::Inapplicable;
    report.detail = "no two machines share an announced speed";
    return report;
  }
  for (const auto& rec : outcome.state.log()) {
    state.assign(rec.job, job_of(rec), rec.machine, rec.charge);
    if (auto v = first_fair_violation(state, any_pair)) {
      report.verdict = Verdict::Fail;
      report.detail = "violated after job " + std::to_string(rec.job);
      json cx = run_header("fair", instance, mechanism);
      cx["args"] = json::object();
      cx["step"] = rec.job;
      cx["witness"] = fair_witness(state, *v);
      report.counterexample = std::move(cx);
      return report;
    }
  }
  report.detail = "held after all " + std::to_string(instance.job_count()) + " assignments";
  return report;
}

namespace {

void check_sigma(const std::vector<MachineId>& sigma, std::size_t m) {
  TieBreakOrder::from_permutation(sigma);  // validates the bijection
  if (sigma.size() != m) throw InvalidInput("permutation size does not match machine count");
}

}  // namespace

Instance permute_machines(const Instance& instance, const std::vector<MachineId>& sigma) {
  check_sigma(sigma, instance.machine_count());
  Instance out = instance;
  for (std::size_t i = 0; i < sigma.size(); ++i) out.machines[sigma[i].index] = instance.machines[i];
  return out;
}

TieBreakOrder permute_order(const TieBreakOrder& order, const std::vector<MachineId>& sigma) {
  check_sigma(sigma, order.size());
  std::vector<MachineId> perm;
  perm.reserve(order.size());
  for (MachineId id : order.permutation()) perm.push_back(sigma[id.index]);
  return TieBreakOrder::from_permutation(std::move(perm), order.seed());
}

VerificationReport check_anonymity(const Instance& instance, const MechanismSpec& mechanism,
                                   const std::vector<MachineId>& sigma) {
  VerificationReport report{"anon", Verdict::Pass, "", std::nullopt};
  const TieBreakOrder order = fixed_ordering(instance.seed, instance.machine_count());
  const auto before = quiet_run(instance, mechanism, order).assignments();
  const auto after =
      quiet_run(permute_machines(instance, sigma), mechanism, permute_order(order, sigma))
          .assignments();
  for (std::size_t j = 0; j < before.size(); ++j) {
    const MachineId expected = sigma[before[j].index];
    if (after[j] != expected) {
      report.verdict = Verdict::Fail;
      report.detail = "job " + std::to_string(j) + " moved to machine " +
                      std::to_string(after[j].index) + " instead of " +
                      std::to_string(expected.index);
      json cx = run_header("anon", instance, mechanism);
      json perm = json::array();
      for (MachineId id : sigma) perm.push_back(id.index);
      cx["args"] = {{"permutation", perm}};
      cx["job"] = j;
      cx["expected"] = expected.index;
      cx["actual"] = after[j].index;
      report.counterexample = std::move(cx);
      return report;
    }
  }
  report.detail = "assignments commute with the permutation";
  return report;
}

std::vector<MachineId> default_permutation(const Instance& instance) {
  const TieBreakOrder order = fixed_ordering(instance.seed ^ 0x5bd1e995u, instance.machine_count());
  return {order.permutation().begin(), order.permutation().end()};
}

std::vector<Rational> default_bid_grid(const Instance& instance, const MechanismSpec& mechanism) {
  instance.validate();
  Rational lo = instance.machines[0].claimed_speed;
  Rational hi = lo;
  for (const auto& m : instance.machines) {
    lo = std::min(lo, m.claimed_speed);
    hi = std::max(hi, m.claimed_speed);
  }
  lo /= 4;
  hi *= 4;
  std::vector<Rational> grid;
  const Rational base = mechanism.rounding_base();
  if (base > 1) {
    Rational s = round_speed(lo, base);
    if (s < lo) s *= base;
    for (; s <= hi; s *= base) grid.push_back(s);
    return grid;
  }
  for (const auto& m : instance.machines) {
    for (int k = -2; k <= 2; ++k) grid.push_back(m.claimed_speed * pow(Rational(2), k));
  }
  sort_unique(grid);
  const std::size_t n = grid.size();
  for (std::size_t k = 0; k + 1 < n; ++k) grid.push_back((grid[k] + grid[k + 1]) / 2);
  sort_unique(grid);
  return grid;
}

std::vector<Rational> workload_by_bid(const Instance& instance, const MechanismSpec& mechanism,
                                      MachineId machine, const std::vector<Rational>& bids,
                                      Execution execution) {
  instance.validate();
  if (machine.index >= instance.machine_count()) {
    throw StructuralError("unknown machine id " + std::to_string(machine.index));
  }
  const TieBreakOrder order = fixed_ordering(instance.seed, instance.machine_count());
  std::vector<Rational> loads(bids.size());
  for_each_index(bids.size(), execution, [&](std::size_t k) {
    Instance probe = instance;
    probe.machines[machine.index].claimed_speed = bids[k];
    loads[k] = quiet_run(probe, mechanism, order).state.machine(machine).workload;
  });
  return loads;
}

VerificationReport scan_machine_monotonicity(const Instance& instance,
                                             const MechanismSpec& mechanism, MachineId machine,
                                             std::vector<Rational> bids, Execution execution) {
  VerificationReport report{"mono-machine", Verdict::Pass, "", std::nullopt};
  for (const auto& b : bids) {
    if (!is_positive(b)) throw InvalidInput("bid speeds must be positive");
  }
  sort_unique(bids);
  if (bids.size() < 2) {
    report.verdict = Verdict::Inapplicable;
    report.detail = "fewer than two distinct bids";
    return report;
  }
  const auto loads = workload_by_bid(instance, mechanism, machine, bids, execution);
  for (std::size_t k = 0; k + 1 < bids.size(); ++k) {
    if (loads[k + 1] < loads[k]) {
      report.verdict = Verdict::Fail;
      report.detail = "machine " + std::to_string(machine.index) + " gets less work at speed " +
                      to_string(bids[k + 1]) + " than at " + to_string(bids[k]);
      json cx = run_header("mono-machine", instance, mechanism);
      cx["args"] = {{"machine", machine.index}, {"bids", rationals_json(bids)}};
      cx["witness"] = {{"bid_low", rational_json(bids[k])},
                       {"workload_low", rational_json(loads[k])},
                       {"bid_high", rational_json(bids[k + 1])},
                       {"workload_high", rational_json(loads[k + 1])}};
      report.counterexample = std::move(cx);
      return report;
    }
  }
  report.detail = "workload non-decreasing over " + std::to_string(bids.size()) + " bids";
  return report;
}

std::vector<Rational> default_misreport_grid(const Instance& instance, std::size_t job) {
  if (job >= instance.job_count()) throw StructuralError("unknown job " + std::to_string(job));
  std::vector<Rational> grid;
  const Rational& p = instance.jobs[job].true_size;
  for (long k = -6; k <= 6; ++k) grid.push_back(p * pow(Rational(2), k));
  for (const auto& j : instance.jobs) grid.push_back(j.true_size);
  sort_unique(grid);
  return grid;
}

Rational realized_job_cost(const Instance& instance, const MechanismSpec& mechanism,
                           std::size_t job, const Rational& reported) {
  if (job >= instance.job_count()) throw StructuralError("unknown job " + std::to_string(job));
  if (!is_positive(reported)) throw InvalidInput("reported size must be positive");
  Instance prefix = instance;
  prefix.jobs.resize(job + 1);
  prefix.jobs[job].reported_size = reported;
  return quiet_run(prefix, mechanism).job_costs[job];
}

VerificationReport scan_job_truthfulness(const Instance& instance, const MechanismSpec& mechanism,
                                         std::size_t job, std::vector<Rational> misreports,
                                         Execution execution) {
  VerificationReport report{"truth-job", Verdict::Pass, "", std::nullopt};
  instance.validate();
  const Rational& truth = instance.jobs.at(job).true_size;
  sort_unique(misreports);
  misreports.erase(std::remove(misreports.begin(), misreports.end(), truth), misreports.end());
  if (misreports.empty()) {
    report.verdict = Verdict::Inapplicable;
    report.detail = "no misreport to try";
    return report;
  }
  const Rational truthful_cost = realized_job_cost(instance, mechanism, job, truth);
  std::vector<Rational> costs(misreports.size());
  for_each_index(misreports.size(), execution, [&](std::size_t k) {
    costs[k] = realized_job_cost(instance, mechanism, job, misreports[k]);
  });
  for (std::size_t k = 0; k < misreports.size(); ++k) {
    if (costs[k] < truthful_cost) {
      report.verdict = Verdict::Fail;
      report.detail = "job " + std::to_string(job) + " gains by reporting " +
                      to_string(misreports[k]) + " instead of " + to_string(truth);
      json cx = run_header("truth-job", instance, mechanism);
      cx["args"] = {{"job", job}, {"misreports", rationals_json(misreports)}};
      cx["witness"] = {{"misreport", rational_json(misreports[k])},
                       {"truthful_cost", rational_json(truthful_cost)},
                       {"misreport_cost", rational_json(costs[k])}};
      report.counterexample = std::move(cx);
      return report;
    }
  }
  report.detail = "truthful cost " + to_string(truthful_cost) + " is minimal over " +
                  std::to_string(misreports.size()) + " misreports";
  return report;
}

VerificationReport verify_property(const Instance& instance, const MechanismSpec& mechanism,
                                   Property property, const VerifyOptions& options) {
  instance.validate();
  switch (property) {
    case Property::WbStrong:
      return check_run_well_behaved(instance, mechanism, WellBehavedMode::Strong,
                                    options.basis.value_or(SpeedBasis::Announced));
    case Property::WbWeak:
      return check_run_well_behaved(instance, mechanism, WellBehavedMode::Weak,
                                    options.basis.value_or(SpeedBasis::True));
    case Property::Fair:
      return check_run_fairness(instance, mechanism);
    case Property::Anon:
      return check_anonymity(instance, mechanism,
                             options.permutation.value_or(default_permutation(instance)));
    case Property::MonoMachine: {
      const auto grid = options.grid.value_or(default_bid_grid(instance, mechanism));
      std::vector<MachineId> targets;
      if (options.machine) {
        targets.push_back(*options.machine);
      } else {
        for (std::size_t i = 0; i < instance.machine_count(); ++i) targets.push_back({i});
      }
      VerificationReport last;
      for (MachineId id : targets) {
        last = scan_machine_monotonicity(instance, mechanism, id, grid, options.execution);
        if (last.failed()) return last;
      }
      last.detail = "workload non-decreasing for " + std::to_string(targets.size()) +
                    " machine(s) over " + std::to_string(grid.size()) + " bids";
      return last;
    }
    case Property::TruthJob: {
      std::vector<std::size_t> targets;
      if (options.job) {
        targets.push_back(*options.job);
      } else {
        for (std::size_t j = 0; j < instance.job_count(); ++j) targets.push_back(j);
      }
      VerificationReport last{"truth-job", Verdict::Inapplicable, "no jobs", std::nullopt};
      std::size_t checked = 0;
      for (std::size_t j : targets) {
        auto grid = options.grid.value_or(default_misreport_grid(instance, j));
        auto r = scan_job_truthfulness(instance, mechanism, j, grid, options.execution);
        if (r.failed()) return r;
        if (r.verdict == Verdict::Pass) ++checked;
      }
      if (checked > 0) {
        last.verdict = Verdict::Pass;
        last.detail = "no profitable misreport for " + std::to_string(checked) + " job(s)";
      }
      return last;
    }
  }
  throw InvalidInput("unknown property");
}

VerificationReport replay_counterexample(const json& counterexample) {
  if (!counterexample.is_object()) throw ParseError("counterexample must be a JSON object");
  for (const char* key : {"property", "instance", "mechanism"}) {
    if (!counterexample.contains(key)) {
      throw ParseError(std::string("counterexample: missing \"") + key + "\"");
    }
  }
  const Property property = parse_property(counterexample["property"].get<std::string>());
  const Instance instance = instance_from_json(counterexample["instance"]);
  const MechanismSpec mechanism = mechanism_from_json(counterexample["mechanism"]);
  const json args = counterexample.value("args", json::object());

  VerifyOptions options;
  if (args.contains("basis")) options.basis = parse_speed_basis(args["basis"].get<std::string>());
  if (args.contains("permutation")) {
    std::vector<MachineId> sigma;
    for (const auto& v : args["permutation"]) sigma.push_back({v.get<std::size_t>()});
    options.permutation = std::move(sigma);
  }
  if (args.contains("machine")) options.machine = MachineId{args["machine"].get<std::size_t>()};
  if (args.contains("job")) options.job = args["job"].get<std::size_t>();
  if (args.contains("bids")) options.grid = rationals_from_json(args["bids"], "args.bids");
  if (args.contains("misreports")) {
    options.grid = rationals_from_json(args["misreports"], "args.misreports");
  }
  return verify_property(instance, mechanism, property, options);
}

}  // namespace loadbal
