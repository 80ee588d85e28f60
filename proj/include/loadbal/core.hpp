#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loadbal/rational.hpp"

namespace loadbal {

struct MachineId {
  std::size_t index = 0;

  friend constexpr auto operator<=>(MachineId, MachineId) = default;
};

// A machine as submitted to a mechanism. `claimed_speed` is what the machine
// reports in the first phase; it equals `true_speed` unless a scan is probing
// misreports. The announced speed lives in ScheduleState.
struct Machine {
  Rational true_speed;
  Rational claimed_speed;

  static Machine truthful(Rational speed) { return Machine{speed, speed}; }
};

// `reported_size` drives the mechanism's decisions and workload accounting;
// `true_size` is only used when pricing the job's own realized cost.
struct Job {
  Rational true_size;
  Rational reported_size;

  static Job truthful(Rational size) { return Job{size, size}; }
};

// Jobs arrive in list order.
struct Instance {
  std::vector<Machine> machines;
  std::vector<Job> jobs;
  std::uint64_t seed = 0;

  static Instance from_values(const std::vector<Rational>& speeds,
                              const std::vector<Rational>& sizes, std::uint64_t seed = 0);

  std::size_t machine_count() const { return machines.size(); }
  std::size_t job_count() const { return jobs.size(); }

  // Throws InvalidInput unless there is at least one machine and every
  // speed and size is strictly positive.
  void validate() const;
};

// Pre-fixed total order over machines used to break exact ties.
class TieBreakOrder {
 public:
  TieBreakOrder() = default;

  static TieBreakOrder identity(std::size_t machine_count);
  // Throws InvalidInput unless `permutation` is a bijection over [0, size).
  static TieBreakOrder from_permutation(std::vector<MachineId> permutation,
                                        std::uint64_t seed = 0);

  std::size_t size() const { return permutation_.size(); }
  std::span<const MachineId> permutation() const { return permutation_; }
  std::uint64_t seed() const { return seed_; }

  // Position of `id` in the order; lower ranks win ties.
  std::size_t rank(MachineId id) const { return rank_.at(id.index); }
  bool precedes(MachineId a, MachineId b) const { return rank(a) < rank(b); }

  friend bool operator==(const TieBreakOrder& a, const TieBreakOrder& b) {
    return a.permutation_ == b.permutation_;
  }

 private:
  std::vector<MachineId> permutation_;
  std::vector<std::size_t> rank_;
  std::uint64_t seed_ = 0;
};

// Seeded Fisher-Yates shuffle of [0, m). The index draw uses the raw
// mt19937_64 stream so the result does not depend on the standard library.
TieBreakOrder fixed_ordering(std::uint64_t seed, std::size_t machine_count);

struct MachineLoad {
  Rational announced_speed;
  Rational true_speed;
  Rational workload{0};
  Rational makespan{0};  // workload / announced_speed
};

struct AssignmentRecord {
  std::size_t job = 0;
  MachineId machine;
  Rational reported_size;
  Rational true_size;
  Rational charge;
};

enum class SpeedBasis { Announced, True };

class ScheduleState {
 public:
  ScheduleState() = default;
  ScheduleState(std::vector<Rational> announced_speeds, std::vector<Rational> true_speeds);

  std::size_t machine_count() const { return machines_.size(); }
  std::span<const MachineLoad> machines() const { return machines_; }
  const MachineLoad& machine(MachineId id) const;
  std::span<const AssignmentRecord> log() const { return log_; }

  // Index into log() of the last job placed on `id`, if any.
  std::optional<std::size_t> last_assignment(MachineId id) const;

  // Adds the job's reported size to the machine's workload. Throws
  // StructuralError for an unknown machine and InvalidInput for a
  // non-positive size or a negative charge.
  void assign(std::size_t job_index, const Job& job, MachineId id, const Rational& charge);

 private:
  std::vector<MachineLoad> machines_;
  std::vector<AssignmentRecord> log_;
  std::vector<std::optional<std::size_t>> last_;
};

ScheduleState initial_state(const Instance& instance, std::span<const Rational> announced_speeds);

// Value-semantics form of ScheduleState::assign.
ScheduleState apply_assignment(ScheduleState state, std::size_t job_index, const Job& job,
                               MachineId id, const Rational& charge);

// max_i W_i / s_i on the chosen speed basis; 0 for an empty schedule.
Rational makespan(const ScheduleState& state, SpeedBasis basis = SpeedBasis::Announced);

// Rebuilds the state by replaying `log` from empty machines.
ScheduleState replay(const ScheduleState& state);

// One online step of a mechanism run. `prices` is per machine id and is all
// zero for mechanisms that do not charge jobs.
struct StepRecord {
  std::size_t job = 0;
  std::vector<ExtendedRational> prices;
  MachineId chosen;
  Rational charge;
  std::vector<Rational> makespans;  // after the assignment, announced speeds
};

struct MechanismOutcome {
  std::string mechanism;
  ScheduleState state;
  std::vector<StepRecord> steps;  // empty when tracing was disabled
  // completion time on the chosen machine (true size over announced speed)
  // plus the charge.
  std::vector<Rational> job_costs;
  Rational alg_announced{0};
  Rational alg_true{0};
  // Per-machine payment; nullopt when the mechanism defines none.
  std::vector<std::optional<Rational>> payments;

  std::vector<MachineId> assignments() const;
};

void finalize_makespans(MechanismOutcome& outcome);

}  // namespace loadbal
