#include "loadbal/core.hpp"

#include <numeric>
#include <random>

#include "loadbal/error.hpp"

namespace loadbal {

Instance Instance::from_values(const std::vector<Rational>& speeds,
                               const std::vector<Rational>& sizes, std::uint64_t seed) {
  Instance instance;
  instance.seed = seed;
  instance.machines.reserve(speeds.size());
  for (const auto& s : speeds) instance.machines.push_back(Machine::truthful(s));
  instance.jobs.reserve(sizes.size());
  for (const auto& p : sizes) instance.jobs.push_back(Job::truthful(p));
  return instance;
}

void Instance::validate() const {
  if (machines.empty()) throw InvalidInput("instance has no machines");
  for (std::size_t i = 0; i < machines.size(); ++i) {
    if (!is_positive(machines[i].true_speed) || !is_positive(machines[i].claimed_speed)) {
      throw InvalidInput("machines[" + std::to_string(i) + "]: speed must be positive");
    }
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!is_positive(jobs[j].true_size) || !is_positive(jobs[j].reported_size)) {
      throw InvalidInput("jobs[" + std::to_string(j) + "]: size must be positive");
    }
  }
}

TieBreakOrder TieBreakOrder::identity(std::size_t machine_count) {
  std::vector<MachineId> perm(machine_count);
  for (std::size_t i = 0; i < machine_count; ++i) perm[i] = MachineId{i};
  return from_permutation(std::move(perm));
}

TieBreakOrder TieBreakOrder::from_permutation(std::vector<MachineId> permutation,
                                              std::uint64_t seed) {
  TieBreakOrder order;
  order.rank_.assign(permutation.size(), permutation.size());
  for (std::size_t pos = 0; pos < permutation.size(); ++pos) {
    std::size_t id = permutation[pos].index;
    if (id >= permutation.size() || order.rank_[id] != permutation.size()) {
      throw InvalidInput("tie-break order is not a permutation");
    }
    order.rank_[id] = pos;
  }
  order.permutation_ = std::move(permutation);
  order.seed_ = seed;
  return order;
}

TieBreakOrder fixed_ordering(std::uint64_t seed, std::size_t machine_count) {
  std::vector<MachineId> perm(machine_count);
  for (std::size_t i = 0; i < machine_count; ++i) perm[i] = MachineId{i};
  std::mt19937_64 rng(seed);
  for (std::size_t i = machine_count; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return TieBreakOrder::from_permutation(std::move(perm), seed);
}

ScheduleState::ScheduleState(std::vector<Rational> announced_speeds,
                             std::vector<Rational> true_speeds) {
  if (announced_speeds.size() != true_speeds.size()) {
    throw InvalidInput("announced and true speed lists differ in length");
  }
  machines_.resize(announced_speeds.size());
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    if (!is_positive(announced_speeds[i]) || !is_positive(true_speeds[i])) {
      throw InvalidInput("machine speeds must be positive");
    }
    machines_[i].announced_speed = std::move(announced_speeds[i]);
    machines_[i].true_speed = std::move(true_speeds[i]);
  }
  last_.assign(machines_.size(), std::nullopt);
}

const MachineLoad& ScheduleState::machine(MachineId id) const {
  if (id.index >= machines_.size()) {
    throw StructuralError("unknown machine id " + std::to_string(id.index));
  }
  return machines_[id.index];
}

std::optional<std::size_t> ScheduleState::last_assignment(MachineId id) const {
  if (id.index >= machines_.size()) {
    throw StructuralError("unknown machine id " + std::to_string(id.index));
  }
  return last_[id.index];
}

void ScheduleState::assign(std::size_t job_index, const Job& job, MachineId id,
                           const Rational& charge) {
  if (id.index >= machines_.size()) {
    throw StructuralError("unknown machine id " + std::to_string(id.index));
  }
  if (!is_positive(job.reported_size) || !is_positive(job.true_size)) {
    throw InvalidInput("job " + std::to_string(job_index) + ": size must be positive");
  }
  if (sgn(charge) < 0) throw InvalidInput("charge must be nonnegative");
  auto& m = machines_[id.index];
  m.workload += job.reported_size;
  m.makespan = m.workload / m.announced_speed;
  last_[id.index] = log_.size();
  log_.push_back(AssignmentRecord{job_index, id, job.reported_size, job.true_size, charge});
}

ScheduleState initial_state(const Instance& instance, std::span<const Rational> announced_speeds) {
  std::vector<Rational> announced(announced_speeds.begin(), announced_speeds.end());
  std::vector<Rational> truth;
  truth.reserve(instance.machines.size());
  for (const auto& m : instance.machines) truth.push_back(m.true_speed);
  return ScheduleState(std::move(announced), std::move(truth));
}

ScheduleState apply_assignment(ScheduleState state, std::size_t job_index, const Job& job,
                               MachineId id, const Rational& charge) {
  state.assign(job_index, job, id, charge);
  return state;
}

Rational makespan(const ScheduleState& state, SpeedBasis basis) {
  Rational best(0);
  for (const auto& m : state.machines()) {
    if (basis == SpeedBasis::Announced) {
      if (m.makespan > best) best = m.makespan;
    } else {
      Rational c = m.workload / m.true_speed;
      if (c > best) best = c;
    }
  }
  return best;
}

ScheduleState replay(const ScheduleState& state) {
  std::vector<Rational> announced, truth;
  for (const auto& m : state.machines()) {
    announced.push_back(m.announced_speed);
    truth.push_back(m.true_speed);
  }
  ScheduleState fresh(std::move(announced), std::move(truth));
  for (const auto& rec : state.log()) {
    fresh.assign(rec.job, Job{rec.true_size, rec.reported_size}, rec.machine, rec.charge);
  }
  return fresh;
}

std::vector<MachineId> MechanismOutcome::assignments() const {
  std::vector<MachineId> out(job_costs.size());
  for (const auto& rec : state.log()) {
    if (rec.job >= out.size()) out.resize(rec.job + 1);
    out[rec.job] = rec.machine;
  }
  return out;
}

void finalize_makespans(MechanismOutcome& outcome) {
  outcome.alg_announced = makespan(outcome.state, SpeedBasis::Announced);
  outcome.alg_true = makespan(outcome.state, SpeedBasis::True);
}

}  // namespace loadbal
