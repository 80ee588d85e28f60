#include "loadbal/baselines.hpp"

#include <algorithm>

#include "loadbal/error.hpp"

namespace loadbal {

namespace {

void record_step(MechanismOutcome& outcome, std::size_t job, MachineId chosen) {
  StepRecord step;
  step.job = job;
  step.prices.assign(outcome.state.machine_count(), ExtendedRational(Rational(0)));
  step.chosen = chosen;
  step.charge = 0;
  for (const auto& m : outcome.state.machines()) step.makespans.push_back(m.makespan);
  outcome.steps.push_back(std::move(step));
}

// Charges nothing; the job's cost is its completion time.
void place(MechanismOutcome& outcome, std::size_t j, const Job& job, MachineId id,
           bool record_trace) {
  const auto& target = outcome.state.machine(id);
  outcome.job_costs.push_back(target.makespan + job.true_size / target.announced_speed);
  outcome.state.assign(j, job, id, Rational(0));
  if (record_trace) record_step(outcome, j, id);
}

std::vector<Rational> claimed_speeds(const Instance& instance) {
  std::vector<Rational> speeds;
  for (const auto& m : instance.machines) speeds.push_back(m.claimed_speed);
  return speeds;
}

void check_order(const Instance& instance, const TieBreakOrder& order) {
  if (order.size() != instance.machine_count()) {
    throw InvalidInput("tie-break order size does not match machine count");
  }
}

}  // namespace

MechanismOutcome run_vcg(const Instance& instance, const TieBreakOrder& order, bool record_trace) {
  instance.validate();
  check_order(instance, order);
  const std::size_t m = instance.machine_count();

  std::vector<MachineId> ranking(m);
  for (std::size_t i = 0; i < m; ++i) ranking[i] = MachineId{i};
  std::sort(ranking.begin(), ranking.end(), [&](MachineId a, MachineId b) {
    int c = cmp(instance.machines[a.index].claimed_speed, instance.machines[b.index].claimed_speed);
    if (c != 0) return c < 0;
    return order.precedes(a, b);
  });
  MachineId winner = ranking.back();

  MechanismOutcome outcome;
  outcome.mechanism = "vcg";
  outcome.state = initial_state(instance, claimed_speeds(instance));
  outcome.payments.assign(m, std::nullopt);
  Rational reported_total(0);
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    reported_total += instance.jobs[j].reported_size;
    place(outcome, j, instance.jobs[j], winner, record_trace);
  }
  if (m >= 2) {
    const Rational& runner_up = instance.machines[ranking[m - 2].index].claimed_speed;
    outcome.payments[winner.index] = Rational(reported_total / runner_up);
  }
  finalize_makespans(outcome);
  return outcome;
}

MechanismOutcome run_greedy_identical(const Instance& instance, const TieBreakOrder& order,
                                      bool record_trace) {
  instance.validate();
  check_order(instance, order);
  const std::size_t m = instance.machine_count();

  MechanismOutcome outcome;
  outcome.mechanism = "greedy-identical";
  outcome.state = initial_state(instance, std::vector<Rational>(m, Rational(1)));
  outcome.payments.assign(m, std::nullopt);
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    MachineId best{order.permutation()[0]};
    for (MachineId id : order.permutation()) {
      // Scanning in tie-break order keeps the earliest-ranked minimum.
      if (outcome.state.machine(id).workload < outcome.state.machine(best).workload) best = id;
    }
    place(outcome, j, instance.jobs[j], best, record_trace);
  }
  finalize_makespans(outcome);
  return outcome;
}

MechanismOutcome run_greedy_true(const Instance& instance, bool record_trace) {
  instance.validate();
  const std::size_t m = instance.machine_count();

  MechanismOutcome outcome;
  outcome.mechanism = "greedy-true";
  outcome.state = initial_state(instance, claimed_speeds(instance));
  outcome.payments.assign(m, std::nullopt);
  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    const Rational& size = instance.jobs[j].reported_size;
    std::size_t best = 0;
    Rational best_finish;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& load = outcome.state.machine(MachineId{i});
      Rational finish = load.makespan + size / load.announced_speed;
      if (i == 0 || finish < best_finish) {
        best = i;
        best_finish = std::move(finish);
      }
    }
    place(outcome, j, instance.jobs[j], MachineId{best}, record_trace);
  }
  finalize_makespans(outcome);
  return outcome;
}

}  // namespace loadbal
