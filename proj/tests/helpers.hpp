#pragma once

#include <string>
#include <vector>

#include "loadbal/generators.hpp"

namespace testing_support {

using loadbal::Rational;

inline Rational q(const char* text) { return loadbal::parse_rational(text); }

inline std::vector<Rational> qs(std::initializer_list<const char*> texts) {
  std::vector<Rational> out;
  for (const char* t : texts) out.push_back(q(t));
  return out;
}

// Speeds (1, 2, 4) and jobs (6, 4, 1, 3/5).
inline loadbal::Instance worked_example() {
  return loadbal::Instance::from_values(qs({"1", "2", "4"}), qs({"6", "4", "1", "3/5"}));
}

// Small random instance cycling through the random, bounded and unit families.
inline loadbal::Instance small_random(std::uint64_t seed, std::size_t m_max, std::size_t n_max,
                                      bool raw_speeds = true) {
  loadbal::FamilySpec spec;
  const loadbal::Family families[] = {loadbal::Family::Random, loadbal::Family::Bounded,
                                      loadbal::Family::Unit};
  spec.family = families[seed % 3];
  spec.m = 1 + seed % m_max;
  spec.n = (seed / 3) % (n_max + 1);
  spec.seed = seed;
  spec.speed_max = 8;
  spec.p_max = 8;
  spec.raw_speeds = raw_speeds && seed % 2 == 1;
  return loadbal::generate(spec);
}

}  // namespace testing_support
