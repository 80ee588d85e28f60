#include "loadbal/pricing.hpp"

#include <algorithm>
#include <numeric>

#include "loadbal/error.hpp"

namespace loadbal {

Rational round_speed(const Rational& speed, const Rational& base) {
  if (!is_positive(speed)) throw InvalidInput("speed must be positive");
  if (base < 1) throw InvalidInput("rounding base must be at least 1");
  if (base == 1) return speed;
  Rational power(1);
  if (speed >= 1) {
    while (power * base <= speed) power *= base;
  } else {
    while (power > speed) power /= base;
  }
  return power;
}

std::vector<Rational> announce_speeds(const Instance& instance, const Rational& base) {
  std::vector<Rational> announced;
  announced.reserve(instance.machines.size());
  for (const auto& m : instance.machines) announced.push_back(round_speed(m.claimed_speed, base));
  return announced;
}

namespace {

// Ascending announced speed, then makespan, then tie-break rank.
std::vector<MachineId> sorted_machines(const ScheduleState& state, const TieBreakOrder& order) {
  auto machines = state.machines();
  std::vector<MachineId> ids(machines.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = MachineId{i};
  std::sort(ids.begin(), ids.end(), [&](MachineId a, MachineId b) {
    const auto& ma = machines[a.index];
    const auto& mb = machines[b.index];
    if (int c = cmp(ma.announced_speed, mb.announced_speed); c != 0) return c < 0;
    if (int c = cmp(ma.makespan, mb.makespan); c != 0) return c < 0;
    return order.precedes(a, b);
  });
  return ids;
}

}  // namespace

std::vector<MachineId> active_machines(const ScheduleState& state, const TieBreakOrder& order) {
  if (order.size() != state.machine_count()) {
    throw InvalidInput("tie-break order size does not match machine count");
  }
  auto ids = sorted_machines(state, order);
  std::vector<MachineId> active;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k == 0 || state.machine(ids[k]).announced_speed != state.machine(ids[k - 1]).announced_speed) {
      active.push_back(ids[k]);
    }
  }
  return active;
}

PriceVector compute_prices(const ScheduleState& state, const std::vector<MachineId>& active) {
  const std::size_t m = state.machine_count();
  PriceVector prices;
  prices.price.assign(m, ExtendedRational::infinity());
  prices.increment.assign(m, std::nullopt);
  prices.active = active;

  Rational suffix(0);
  for (std::size_t k = active.size(); k-- > 0;) {
    const auto& here = state.machine(active[k]);
    Rational increment(0);
    if (k + 1 < active.size()) {
      const auto& next = state.machine(active[k + 1]);
      increment = here.announced_speed / next.announced_speed * (next.makespan - here.makespan);
      if (sgn(increment) < 0) {
        throw InvariantViolation("negative price increment on machine " +
                                 std::to_string(active[k].index) +
                                 ": schedule is not well-behaved");
      }
    }
    suffix += increment;
    prices.price[active[k].index] = ExtendedRational(suffix);
    prices.increment[active[k].index] = increment;
  }
  return prices;
}

PriceVector compute_prices(const ScheduleState& state, const TieBreakOrder& order) {
  return compute_prices(state, active_machines(state, order));
}

ExtendedRational selfish_cost(const ScheduleState& state, const PriceVector& prices,
                              MachineId id, const Rational& size) {
  const auto& m = state.machine(id);
  const auto& price = prices.price.at(id.index);
  if (!price.is_finite()) return ExtendedRational::infinity();
  return ExtendedRational(Rational(m.makespan + size / m.announced_speed + price.value()));
}

MachineId selfish_choice(const ScheduleState& state, const PriceVector& prices,
                         const Rational& reported_size, CostTieRule rule,
                         const TieBreakOrder& order) {
  std::optional<MachineId> best;
  Rational best_cost;
  for (std::size_t i = 0; i < state.machine_count(); ++i) {
    MachineId id{i};
    const auto& price = prices.price.at(i);
    if (!price.is_finite()) continue;
    const auto& m = state.machine(id);
    Rational cost = m.makespan + reported_size / m.announced_speed + price.value();
    if (!best) {
      best = id;
      best_cost = cost;
      continue;
    }
    int c = cmp(cost, best_cost);
    bool take = c < 0;
    if (c == 0) {
      int speed_cmp = cmp(m.announced_speed, state.machine(*best).announced_speed);
      switch (rule) {
        case CostTieRule::PreferFaster:
          take = speed_cmp > 0 || (speed_cmp == 0 && order.precedes(id, *best));
          break;
        case CostTieRule::PreferSlower:
          take = speed_cmp < 0 || (speed_cmp == 0 && order.precedes(id, *best));
          break;
        case CostTieRule::PreferOrder:
          take = order.precedes(id, *best);
          break;
      }
    }
    if (take) {
      best = id;
      best_cost = std::move(cost);
    }
  }
  if (!best) throw StructuralError("every machine is priced at infinity");
  return *best;
}

MechanismOutcome run_ppr(const Instance& instance, const PprConfig& config,
                         const TieBreakOrder& order) {
  instance.validate();
  if (order.size() != instance.machine_count()) {
    throw InvalidInput("tie-break order size does not match machine count");
  }
  if (config.rounding_base < 1) throw InvalidInput("rounding base must be at least 1");

  auto announced = announce_speeds(instance, config.rounding_base);
  MechanismOutcome outcome;
  outcome.mechanism = "ppr";
  outcome.state = initial_state(instance, announced);
  outcome.job_costs.reserve(instance.job_count());
  outcome.payments.assign(instance.machine_count(), std::nullopt);
  auto& state = outcome.state;

  for (std::size_t j = 0; j < instance.job_count(); ++j) {
    const Job& job = instance.jobs[j];
    std::vector<MachineId> active;
    if (config.gate_speed_classes) {
      active = active_machines(state, order);
    } else {
      active = sorted_machines(state, order);
    }
    PriceVector prices = compute_prices(state, active);
    MachineId chosen = selfish_choice(state, prices, job.reported_size, config.cost_tie_rule, order);
    Rational charge = prices.price[chosen.index].value();

    const auto& target = state.machine(chosen);
    outcome.job_costs.push_back(target.makespan + job.true_size / target.announced_speed + charge);
    state.assign(j, job, chosen, charge);

    if (config.record_trace) {
      StepRecord step;
      step.job = j;
      step.prices = std::move(prices.price);
      step.chosen = chosen;
      step.charge = std::move(charge);
      step.makespans.reserve(state.machine_count());
      for (const auto& m : state.machines()) step.makespans.push_back(m.makespan);
      outcome.steps.push_back(std::move(step));
    }
  }
  finalize_makespans(outcome);
  return outcome;
}

}  // namespace loadbal
