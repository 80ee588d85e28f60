#pragma once

#include <string>
#include <string_view>

#include "loadbal/baselines.hpp"
#include "loadbal/pricing.hpp"

namespace loadbal {

enum class MechanismKind { Ppr, Vcg, GreedyIdentical, GreedyTrueSpeeds };

// A mechanism selector shared by the verifiers, the payment curves and the
// CLI. The tie-break order is passed separately so that checks such as
// anonymity can permute it together with the machines.
struct MechanismSpec {
  MechanismKind kind = MechanismKind::Ppr;
  PprConfig ppr{};

  static MechanismSpec ppr_with_base(Rational base);
  // "ppr", "vcg", "greedy-identical" or "greedy-true".
  static MechanismSpec parse(std::string_view name);

  std::string name() const;
  // Base of the speed rounding the mechanism applies; 1 when it has none.
  Rational rounding_base() const;
};

MechanismOutcome run_mechanism(const Instance& instance, const MechanismSpec& spec,
                               const TieBreakOrder& order);

// Uses fixed_ordering(instance.seed, m).
MechanismOutcome run_mechanism(const Instance& instance, const MechanismSpec& spec);

std::string to_string(CostTieRule rule);
CostTieRule parse_cost_tie_rule(std::string_view text);

}  // namespace loadbal
