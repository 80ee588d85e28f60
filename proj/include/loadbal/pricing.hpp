#pragma once

#include <optional>
#include <vector>

#include "loadbal/core.hpp"

namespace loadbal {

// How exact cost ties between machines of different announced speed are
// resolved in selfish_choice. Equal-speed ties always fall back to the
// tie-break order.
enum class CostTieRule { PreferFaster, PreferSlower, PreferOrder };

struct PprConfig {
  // Speeds are rounded down to integer powers of this base; 1 disables
  // rounding (the strictly well-behaved variant).
  Rational rounding_base{2};
  CostTieRule cost_tie_rule = CostTieRule::PreferFaster;
  // Only the minimum-makespan machine of each speed class gets a finite
  // price. Turning this off is an ablation used by the mutation tests.
  bool gate_speed_classes = true;
  bool record_trace = true;
};

// Posted prices before one arrival. `price` and `increment` are indexed by
// machine id; `active` lists the finitely priced machines in ascending order
// of announced speed.
struct PriceVector {
  std::vector<ExtendedRational> price;
  std::vector<std::optional<Rational>> increment;
  std::vector<MachineId> active;
};

// Largest integer power of `base` not exceeding `speed`; `speed` itself when
// base == 1.
Rational round_speed(const Rational& speed, const Rational& base);

std::vector<Rational> announce_speeds(const Instance& instance, const Rational& base);

// Per announced-speed class, the machine with minimum makespan (ties by
// `order`). Result is sorted by ascending announced speed.
std::vector<MachineId> active_machines(const ScheduleState& state, const TieBreakOrder& order);

// pi_i = (s_i / s_next) * (C_next - C_i) along `active`, pi_last = 0, and
// rho_i = sum of pi over i and every faster active machine. Machines outside
// `active` are priced at infinity. Throws InvariantViolation if some pi_i is
// negative, i.e. the active machines are not well-behaved.
PriceVector compute_prices(const ScheduleState& state, const std::vector<MachineId>& active);
PriceVector compute_prices(const ScheduleState& state, const TieBreakOrder& order);

// C_i + size / s_i + rho_i on announced speeds; infinity for unpriced machines.
ExtendedRational selfish_cost(const ScheduleState& state, const PriceVector& prices,
                              MachineId id, const Rational& size);

// The machine minimizing selfish_cost for `reported_size`. Throws
// StructuralError when no machine has a finite price.
MachineId selfish_choice(const ScheduleState& state, const PriceVector& prices,
                         const Rational& reported_size, CostTieRule rule,
                         const TieBreakOrder& order);

// Posted prices for rounded-down speeds, run over the whole online sequence.
MechanismOutcome run_ppr(const Instance& instance, const PprConfig& config,
                         const TieBreakOrder& order);

}  // namespace loadbal
