#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "loadbal/core.hpp"

namespace loadbal {

enum class Family { Hardness, GreedyCounter, Random, Bounded, Unit };

std::string to_string(Family family);
Family parse_family(std::string_view text);

struct FamilySpec {
  Family family = Family::Random;
  std::size_t m = 4;
  std::size_t n = 16;
  std::uint64_t seed = 0;
  Rational epsilon{1, 4};  // greedy_counter
  Rational p_min{1};       // bounded
  Rational p_max{16};      // random and bounded
  // Speeds are powers of two in [1, speed_max] unless raw_speeds is set, in
  // which case they are multiples of 1/8 in the same range.
  Rational speed_max{1024};
  bool raw_speeds = false;
  // Sizes are drawn on a grid of this resolution before normalization.
  unsigned size_denominator = 4;

  // Throws InvalidInput on m == 0, p_min > p_max, epsilon outside (0, 1).
  void validate() const;
};

// Speeds 1 + 2^(i-m) for i = 1..m, and one job of each of those sizes in
// increasing order. Job i alone on machine i finishes at time 1.
Instance gen_hardness(std::size_t m);

// Speeds (1, 1 + eps), jobs (1, 1/eps).
Instance gen_greedy_counter(const Rational& epsilon);

// Seeded random, bounded or unit instance. Minimum speed and minimum size are
// scaled to 1. Random sizes are log-uniform over [1, p_max]; bounded sizes are
// uniform over [p_min, p_max].
Instance gen_random(const FamilySpec& spec);

// Dispatches on spec.family.
Instance generate(const FamilySpec& spec);

}  // namespace loadbal
