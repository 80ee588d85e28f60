#include "loadbal/mechanism.hpp"

#include "loadbal/error.hpp"

namespace loadbal {

MechanismSpec MechanismSpec::ppr_with_base(Rational base) {
  MechanismSpec spec;
  spec.ppr.rounding_base = std::move(base);
  return spec;
}

MechanismSpec MechanismSpec::parse(std::string_view name) {
  MechanismSpec spec;
  if (name == "ppr") {
    spec.kind = MechanismKind::Ppr;
  } else if (name == "vcg") {
    spec.kind = MechanismKind::Vcg;
  } else if (name == "greedy-identical") {
    spec.kind = MechanismKind::GreedyIdentical;
  } else if (name == "greedy-true") {
    spec.kind = MechanismKind::GreedyTrueSpeeds;
  } else {
    throw InvalidInput("unknown mechanism \"" + std::string(name) + "\"");
  }
  return spec;
}

std::string MechanismSpec::name() const {
  switch (kind) {
    case MechanismKind::Ppr: return "ppr";
    case MechanismKind::Vcg: return "vcg";
    case MechanismKind::GreedyIdentical: return "greedy-identical";
    case MechanismKind::GreedyTrueSpeeds: return "greedy-true";
  }
  return "unknown";
}

Rational MechanismSpec::rounding_base() const {
  return kind == MechanismKind::Ppr ? ppr.rounding_base : Rational(1);
}

MechanismOutcome run_mechanism(const Instance& instance, const MechanismSpec& spec,
                               const TieBreakOrder& order) {
  switch (spec.kind) {
    case MechanismKind::Ppr: return run_ppr(instance, spec.ppr, order);
    case MechanismKind::Vcg: return run_vcg(instance, order, spec.ppr.record_trace);
    case MechanismKind::GreedyIdentical:
      return run_greedy_identical(instance, order, spec.ppr.record_trace);
    case MechanismKind::GreedyTrueSpeeds: return run_greedy_true(instance, spec.ppr.record_trace);
  }
  throw InvalidInput("unknown mechanism kind");
}

MechanismOutcome run_mechanism(const Instance& instance, const MechanismSpec& spec) {
  return run_mechanism(instance, spec, fixed_ordering(instance.seed, instance.machine_count()));
}

std::string to_string(CostTieRule rule) {
  switch (rule) {
    case CostTieRule::PreferFaster: return "prefer-faster";
    case CostTieRule::PreferSlower: return "prefer-slower";
    case CostTieRule::PreferOrder: return "prefer-order";
  }
  return "unknown";
}

CostTieRule parse_cost_tie_rule(std::string_view text) {
  if (text == "prefer-faster") return CostTieRule::PreferFaster;
  if (text == "prefer-slower") return CostTieRule::PreferSlower;
  if (text == "prefer-order") return CostTieRule::PreferOrder;
  throw InvalidInput("unknown cost tie rule \"" + std::string(text) + "\"");
}

}  // namespace loadbal
