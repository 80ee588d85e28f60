#include "loadbal/generators.hpp"

#include <algorithm>
#include <random>

#include "loadbal/error.hpp"

namespace loadbal {

std::string to_string(Family family) {
  switch (family) {
    case Family::Hardness: return "hardness";
    case Family::GreedyCounter: return "greedy_counter";
    case Family::Random: return "random";
    case Family::Bounded: return "bounded";
    case Family::Unit: return "unit";
  }
  return "unknown";
}

Family parse_family(std::string_view text) {
  if (text == "hardness") return Family::Hardness;
  if (text == "greedy_counter") return Family::GreedyCounter;
  if (text == "random") return Family::Random;
  if (text == "bounded") return Family::Bounded;
  if (text == "unit") return Family::Unit;
  throw InvalidInput("unknown family \"" + std::string(text) + "\"");
}

void FamilySpec::validate() const {
  if (m == 0) throw InvalidInput("family needs at least one machine");
  if (!is_positive(p_min) || p_min > p_max) throw InvalidInput("need 0 < p_min <= p_max");
  if (speed_max < 1) throw InvalidInput("speed_max must be at least 1");
  if (size_denominator == 0) throw InvalidInput("size_denominator must be positive");
  if (family == Family::GreedyCounter && (sgn(epsilon) <= 0 || epsilon >= 1)) {
    throw InvalidInput("epsilon must lie in (0, 1)");
  }
}

Instance gen_hardness(std::size_t m) {
  if (m == 0) throw InvalidInput("hardness family needs m >= 1");
  std::vector<Rational> speeds;
  speeds.reserve(m);
  for (std::size_t i = 1; i <= m; ++i) {
    speeds.push_back(1 + pow(Rational(2), static_cast<long>(i) - static_cast<long>(m)));
  }
  return Instance::from_values(speeds, speeds);
}

Instance gen_greedy_counter(const Rational& epsilon) {
  if (sgn(epsilon) <= 0 || epsilon >= 1) throw InvalidInput("epsilon must lie in (0, 1)");
  return Instance::from_values({Rational(1), Rational(1 + epsilon)},
                               {Rational(1), Rational(1 / epsilon)});
}

namespace {

// Uniform-ish draw in [0, bound) straight off the engine, so instances do not
// depend on the standard library's distribution implementations.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

// Exponent of the largest power of two <= value (value >= 1).
long floor_log2(const Rational& value) {
  long k = 0;
  Rational p(2);
  while (p <= value) {
    p *= 2;
    ++k;
  }
  return k;
}

// Uniform on {lo + k / den} intersected with [lo, hi].
Rational draw_grid(std::mt19937_64& rng, const Rational& lo, const Rational& hi, unsigned den) {
  Rational steps_q = (hi - lo) * den;
  mpz_class steps = steps_q.get_num() / steps_q.get_den();
  std::uint64_t k = draw(rng, steps.get_ui() + 1);
  return lo + Rational(static_cast<unsigned long>(k), den);
}

void normalize(std::vector<Rational>& values) {
  Rational smallest = *std::min_element(values.begin(), values.end());
  for (auto& v : values) v /= smallest;
}

}  // namespace

Instance gen_random(const FamilySpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  std::vector<Rational> speeds;
  speeds.reserve(spec.m);
  const long top = floor_log2(spec.speed_max);
  for (std::size_t i = 0; i < spec.m; ++i) {
    if (spec.raw_speeds) {
      speeds.push_back(draw_grid(rng, Rational(1), spec.speed_max, 8));
    } else {
      speeds.push_back(pow(Rational(2), static_cast<long>(draw(rng, top + 1))));
    }
  }

  std::vector<Rational> sizes;
  sizes.reserve(spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) {
    switch (spec.family) {
      case Family::Unit:
        sizes.emplace_back(1);
        break;
      case Family::Bounded:
        sizes.push_back(draw_grid(rng, spec.p_min, spec.p_max, spec.size_denominator));
        break;
      default: {
        // Log-uniform: pick an octave, then a grid point inside it.
        const long octaves = floor_log2(spec.p_max);
        Rational lo = pow(Rational(2), static_cast<long>(draw(rng, octaves + 1)));
        Rational hi = std::min(Rational(2 * lo), spec.p_max);
        sizes.push_back(draw_grid(rng, lo, hi, spec.size_denominator));
        break;
      }
    }
  }

  normalize(speeds);
  if (!sizes.empty()) normalize(sizes);
  Instance instance = Instance::from_values(speeds, sizes, spec.seed);
  return instance;
}

Instance generate(const FamilySpec& spec) {
  spec.validate();
  Instance instance;
  switch (spec.family) {
    case Family::Hardness:
      instance = gen_hardness(spec.m);
      break;
    case Family::GreedyCounter:
      instance = gen_greedy_counter(spec.epsilon);
      break;
    default:
      return gen_random(spec);
  }
  instance.seed = spec.seed;
  return instance;
}

}  // namespace loadbal
