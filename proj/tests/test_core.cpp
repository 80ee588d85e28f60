#include <algorithm>

#include <doctest.h>

#include "helpers.hpp"
#include "loadbal/error.hpp"
#include "loadbal/mechanism.hpp"

using namespace loadbal;
using testing_support::q;
using testing_support::qs;

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/5") == Rational(3, 5));
  CHECK(parse_rational("0.6") == Rational(3, 5));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("12") == 12);
  CHECK(parse_rational("-2/4") == Rational(-1, 2));
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational(""), ParseError);
  CHECK(to_string(Rational(6) / 4) == "3/2");
  CHECK(to_string(Rational(4)) == "4");
}

TEST_CASE("extended rationals order infinity last") {
  ExtendedRational inf = ExtendedRational::infinity();
  CHECK(ExtendedRational(Rational(1000)) < inf);
  CHECK(inf == ExtendedRational::infinity());
  CHECK_FALSE(inf.is_finite());
  CHECK_THROWS_AS(inf.value(), RangeError);
  CHECK(to_string(inf) == "inf");
}

TEST_CASE("assigning a job updates workload and makespan") {
  ScheduleState state(qs({"1", "2"}), qs({"1", "2"}));
  state.assign(0, Job::truthful(6), MachineId{1}, 0);
  CHECK(state.machine(MachineId{0}).workload == 0);
  CHECK(state.machine(MachineId{1}).workload == 6);
  CHECK(state.machine(MachineId{0}).makespan == 0);
  CHECK(state.machine(MachineId{1}).makespan == 3);
  CHECK(state.last_assignment(MachineId{1}) == std::optional<std::size_t>(0));
  CHECK_FALSE(state.last_assignment(MachineId{0}).has_value());
}

TEST_CASE("invalid assignments are rejected") {
  ScheduleState state(qs({"1", "2"}), qs({"1", "2"}));
  CHECK_THROWS_AS(state.assign(0, Job::truthful(0), MachineId{0}, 0), InvalidInput);
  CHECK_THROWS_AS(state.assign(0, Job::truthful(1), MachineId{0}, -1), InvalidInput);
  CHECK_THROWS_AS(state.assign(0, Job::truthful(1), MachineId{5}, 0), StructuralError);
  CHECK_THROWS_AS(state.machine(MachineId{2}), StructuralError);
  Instance bad = Instance::from_values(qs({"1"}), qs({"0"}));
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  CHECK_THROWS_AS(Instance{}.validate(), InvalidInput);
}

TEST_CASE("two jobs on the speed-4 machine of the worked example") {
  ScheduleState state(qs({"1", "2", "4"}), qs({"1", "2", "4"}));
  state = apply_assignment(state, 0, Job::truthful(6), MachineId{2}, 0);
  CHECK(state.machine(MachineId{2}).makespan == q("3/2"));
  state = apply_assignment(state, 1, Job::truthful(4), MachineId{2}, 0);
  CHECK(state.machine(MachineId{2}).workload == 10);
  CHECK(state.machine(MachineId{2}).makespan == q("5/2"));
}

TEST_CASE("makespan on either speed basis") {
  ScheduleState state(qs({"1", "2", "4"}), qs({"1", "2", "4"}));
  CHECK(makespan(state) == 0);
  state.assign(0, Job::truthful(q("8/5")), MachineId{1}, 0);
  state.assign(1, Job::truthful(10), MachineId{2}, 0);
  CHECK(makespan(state) == q("5/2"));

  ScheduleState mixed(qs({"1", "2"}), qs({"1", "3"}));
  mixed.assign(0, Job::truthful(3), MachineId{0}, 0);
  mixed.assign(1, Job::truthful(3), MachineId{1}, 0);
  CHECK(makespan(mixed, SpeedBasis::Announced) == 3);
  CHECK(makespan(mixed, SpeedBasis::True) == 3);
}

TEST_CASE("fixed ordering is a seeded permutation") {
  CHECK(fixed_ordering(17, 1) == TieBreakOrder::identity(1));
  CHECK(fixed_ordering(5, 5) == fixed_ordering(5, 5));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto order = fixed_ordering(seed, 7);
    std::vector<bool> seen(7, false);
    for (auto id : order.permutation()) seen.at(id.index) = true;
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    for (auto id : order.permutation()) CHECK(order.permutation()[order.rank(id)] == id);
  }
  CHECK_THROWS_AS(TieBreakOrder::from_permutation({MachineId{0}, MachineId{0}}), InvalidInput);
  CHECK_THROWS_AS(TieBreakOrder::from_permutation({MachineId{2}, MachineId{0}}), InvalidInput);
}

TEST_CASE("C times s equals W exactly and replay is bit-exact") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance instance = testing_support::small_random(seed, 8, 30);
    for (const char* name : {"ppr", "vcg", "greedy-identical", "greedy-true"}) {
      const auto outcome = run_mechanism(instance, MechanismSpec::parse(name));
      for (const auto& m : outcome.state.machines()) {
        CHECK(m.makespan * m.announced_speed == m.workload);
      }
      const ScheduleState again = replay(outcome.state);
      REQUIRE(again.machine_count() == outcome.state.machine_count());
      for (std::size_t i = 0; i < again.machine_count(); ++i) {
        CHECK(again.machines()[i].workload == outcome.state.machines()[i].workload);
        CHECK(again.machines()[i].makespan == outcome.state.machines()[i].makespan);
      }
      CHECK(again.log().size() == outcome.state.log().size());
    }
  }
}

TEST_CASE("makespans never decrease along a run") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance instance = testing_support::small_random(seed, 8, 30);
    const auto outcome = run_mechanism(instance, MechanismSpec::parse("ppr"));
    std::vector<Rational> previous(instance.machine_count(), Rational(0));
    for (const auto& step : outcome.steps) {
      for (std::size_t i = 0; i < previous.size(); ++i) CHECK(step.makespans[i] >= previous[i]);
      previous = step.makespans;
    }
  }
}
