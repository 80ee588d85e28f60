#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "loadbal/mechanism.hpp"
#include "loadbal/parallel.hpp"

namespace loadbal {

enum class Verdict { Pass, Fail, Inapplicable };
enum class WellBehavedMode { Strong, Weak };
enum class Property { WbStrong, WbWeak, Fair, Anon, MonoMachine, TruthJob };

std::string to_string(Verdict verdict);
std::string to_string(Property property);
Property parse_property(std::string_view text);  // "wb-strong", "fair", ...
std::string to_string(SpeedBasis basis);
SpeedBasis parse_speed_basis(std::string_view text);

// A failing report always carries a counterexample. Reports produced by the
// run-level checks embed the instance, mechanism and check arguments so that
// replay_counterexample reproduces the verdict.
struct VerificationReport {
  std::string property;
  Verdict verdict = Verdict::Pass;
  std::string detail;
  std::optional<nlohmann::json> counterexample;

  bool failed() const { return verdict == Verdict::Fail; }
};

nlohmann::json report_to_json(const VerificationReport& report);

// Strong: makespan (W / speed) is non-decreasing in speed. Weak: workload is
// non-decreasing in speed. Machines of equal speed are not compared.
VerificationReport check_well_behaved(const ScheduleState& state, WellBehavedMode mode,
                                      SpeedBasis basis);

// For every pair i, i' of equal announced speed, W_i >= W_i' - (last job on i').
VerificationReport check_fairness(const ScheduleState& state);

// Runs the mechanism and checks the schedule after every single assignment.
VerificationReport check_run_well_behaved(const Instance& instance, const MechanismSpec& mechanism,
                                          WellBehavedMode mode, SpeedBasis basis);
VerificationReport check_run_fairness(const Instance& instance, const MechanismSpec& mechanism);

// new machine sigma[i] is old machine i.
Instance permute_machines(const Instance& instance, const std::vector<MachineId>& sigma);
TieBreakOrder permute_order(const TieBreakOrder& order, const std::vector<MachineId>& sigma);

// Runs the mechanism on the sigma-permuted machines with the tie-break order
// permuted the same way; passes iff every job lands on the image of its
// original machine.
VerificationReport check_anonymity(const Instance& instance, const MechanismSpec& mechanism,
                                   const std::vector<MachineId>& sigma);

// All powers of the rounding base in [min speed / 4, max speed * 4]; for
// mechanisms without rounding, every claimed speed scaled by 1/4..4 plus the
// midpoints between consecutive values.
std::vector<Rational> default_bid_grid(const Instance& instance, const MechanismSpec& mechanism);

// Final workload of `machine` for each claimed speed in `bids` (ascending).
std::vector<Rational> workload_by_bid(const Instance& instance, const MechanismSpec& mechanism,
                                      MachineId machine, const std::vector<Rational>& bids,
                                      Execution execution = Execution::Serial);

// Passes iff the machine's final workload is non-decreasing in its claimed speed.
VerificationReport scan_machine_monotonicity(const Instance& instance,
                                             const MechanismSpec& mechanism, MachineId machine,
                                             std::vector<Rational> bids,
                                             Execution execution = Execution::Serial);

// true * 2^k for k in [-6, 6] plus every true size in the instance.
std::vector<Rational> default_misreport_grid(const Instance& instance, std::size_t job);

// Realized cost of `job` when it reports `reported` and everything before it
// is truthful: completion time of its true size plus the charge.
Rational realized_job_cost(const Instance& instance, const MechanismSpec& mechanism,
                           std::size_t job, const Rational& reported);

// Passes iff no misreport in the grid gives the job a strictly lower
// realized cost than reporting the truth.
VerificationReport scan_job_truthfulness(const Instance& instance, const MechanismSpec& mechanism,
                                         std::size_t job, std::vector<Rational> misreports,
                                         Execution execution = Execution::Serial);

struct VerifyOptions {
  std::optional<SpeedBasis> basis;
  std::optional<std::vector<MachineId>> permutation;
  std::optional<MachineId> machine;   // mono-machine: default all machines
  std::optional<std::size_t> job;     // truth-job: default all jobs
  std::optional<std::vector<Rational>> grid;
  Execution execution = Execution::Serial;
};

// Seeded random permutation of the machines used when none is given.
std::vector<MachineId> default_permutation(const Instance& instance);

VerificationReport verify_property(const Instance& instance, const MechanismSpec& mechanism,
                                   Property property, const VerifyOptions& options = {});

// Re-executes the check recorded in a counterexample.
VerificationReport replay_counterexample(const nlohmann::json& counterexample);

}  // namespace loadbal
