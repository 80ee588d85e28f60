#pragma once

#include "loadbal/core.hpp"

namespace loadbal {

enum class BaselineKind { Vcg, GreedyIdentical, GreedyTrueSpeeds };

// All jobs go to the machine with the highest claimed speed. Claimed speeds
// are sorted ascending with ties by `order`; the last machine wins and is paid
// (sum of reported sizes) / (second entry from the top). With one machine the
// payment is left undefined.
MechanismOutcome run_vcg(const Instance& instance, const TieBreakOrder& order,
                         bool record_trace = true);

// Announces speed 1 everywhere and sends each job to the machine with the
// least workload, ties by `order`.
MechanismOutcome run_greedy_identical(const Instance& instance, const TieBreakOrder& order,
                                      bool record_trace = true);

// Earliest finish time on claimed speeds, ties by machine index. Not
// well-behaved; kept as a foil for the verifiers.
MechanismOutcome run_greedy_true(const Instance& instance, bool record_trace = true);

}  // namespace loadbal
