#pragma once

#include <cstdint>
#include <vector>

#include "loadbal/core.hpp"
#include "loadbal/parallel.hpp"

namespace loadbal {

struct OptOptions {
  // Instances with more jobs go straight to opt_approx.
  std::size_t max_jobs = 18;
  // Search nodes before giving up on exactness.
  std::uint64_t node_budget = 20'000'000;
  Execution execution = Execution::Serial;
};

struct OptResult {
  Rational value{0};
  bool exact = false;
  // Machine per job (arrival index). For exact results its makespan equals
  // `value`; otherwise it is the best schedule found.
  std::vector<MachineId> witness;
  Rational lower_bound{0};
  Rational upper_bound{0};
  std::uint64_t nodes = 0;
};

// True speeds rounded down to powers of `rounding_base` (1 keeps them as is).
std::vector<Rational> oracle_speeds(const Instance& instance, const Rational& rounding_base);

// max_i (sum of true sizes on i) / speed_i.
Rational schedule_makespan(const Instance& instance, const std::vector<Rational>& speeds,
                           const std::vector<MachineId>& assignment);

// Offline optimum on true sizes by depth-first branch-and-bound: jobs in
// decreasing size, machines with identical (speed, load) explored once,
// consecutive equal jobs placed on non-decreasing machine indices, LPT as the
// initial incumbent. The parallel path splits the top of the tree into tasks
// and returns the same value and witness as the serial one. Equal-size job
// sets are solved exactly by list scheduling at any n.
OptResult opt_exact(const Instance& instance, const Rational& rounding_base = Rational(1),
                    const OptOptions& options = {});

// LPT list scheduling upper bound and max(sum p / sum s, p_max / s_max)
// lower bound. Marked exact only when the two coincide.
OptResult opt_approx(const Instance& instance, const Rational& rounding_base = Rational(1));

struct OptSandwich {
  OptResult opt;
  OptResult opt_rounded;
};

// OPT on true speeds and on speeds rounded to powers of `base`. Throws
// InvariantViolation unless OPT <= OPT_base <= base * OPT (checked on the
// brackets when either side is inexact).
OptSandwich opt2_sandwich(const Instance& instance, const Rational& base,
                          const OptOptions& options = {});

}  // namespace loadbal
