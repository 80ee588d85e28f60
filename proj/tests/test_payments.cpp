#include <doctest.h>

#include "helpers.hpp"
#include "loadbal/error.hpp"
#include "loadbal/payments.hpp"
#include "oracles.hpp"

using namespace loadbal;
using testing_support::q;
using testing_support::qs;

namespace {

// Independent integral: split each piece into ten parts and sum L at the
// midpoints.
Rational midpoint_payment(const WorkloadCurve& curve, const Rational& b) {
  Rational total = b * curve.load_at(b);
  for (const auto& p : curve.pieces()) {
    if (p.b_hi <= b) continue;
    const Rational lo = std::max(p.b_lo, b);
    const Rational step = (p.b_hi - lo) / 10;
    for (int k = 0; k < 10; ++k) {
      const Rational mid = lo + step * k + step / 2;
      total += curve.load_at(mid) * step;
    }
  }
  return total;
}

Instance unit_instance(const std::vector<Rational>& speeds, std::size_t n) {
  return Instance::from_values(speeds, std::vector<Rational>(n, Rational(1)));
}

}  // namespace

TEST_CASE("step curve payment") {
  const WorkloadCurve curve({{q("1/4"), q("1/4"), 2}, {q("1/4"), q("1/2"), 2}, {q("1/2"), 1, 0}},
                            true);
  CHECK(payment(curve, q("1/4")).value == 1);
  CHECK_FALSE(payment(curve, q("1/4")).truncated);
  CHECK(payment(curve, q("3/4")).value == 0);
  CHECK(payment(curve, q("1/2")).value == 1);  // L = 2 at 1/2, nothing after
  CHECK(utility(curve, q("1/4"), q("1/4")) == payment(curve, q("1/4")).value - q("1/4") * 2);
  CHECK(curve.is_non_increasing());
  CHECK_THROWS_AS(curve.load_at(2), RangeError);
  CHECK_THROWS_AS(curve.load_at(q("1/8")), RangeError);
}

TEST_CASE("zero tail gives b times L") {
  const WorkloadCurve curve({{q("1/2"), 1, 3}, {1, 2, 0}}, false);
  CHECK(payment(curve, 1).value == 3);
  CHECK(payment(curve, q("3/2")).value == 0);
}

TEST_CASE("bad curves are rejected") {
  CHECK_THROWS_AS(WorkloadCurve({}, false), InvalidInput);
  CHECK_THROWS_AS(WorkloadCurve({{1, 2, 1}, {3, 4, 0}}, false), InvalidInput);
  CHECK_THROWS_AS(WorkloadCurve({{2, 1, 1}}, false), InvalidInput);
  CHECK_THROWS_AS(WorkloadCurve({{1, 2, -1}}, false), InvalidInput);
}

TEST_CASE("increasing curve makes lying profitable") {
  const WorkloadCurve curve({{q("1/4"), q("1/4"), 0}, {q("1/4"), q("1/2"), 0}, {q("1/2"), 1, 2}},
                            true);
  CHECK_FALSE(curve.is_non_increasing());
  CHECK(utility(curve, q("1/4"), q("1/4")) == 1);
  CHECK(utility(curve, 1, q("1/4")) == q("3/2"));
  const auto rows = payment_table(curve);
  REQUIRE(rows.front().b == q("1/4"));
  CHECK(rows.front().utility_best_lie > rows.front().utility_truth);
}

TEST_CASE("rounded mechanisms give constant pieces per power") {
  const auto instance = unit_instance(qs({"1", "1"}), 5);
  const auto curve = workload_curve(instance, MechanismSpec::ppr_with_base(2), MachineId{0});
  for (const auto& p : curve.pieces()) {
    CHECK(p.b_lo * 2 == p.b_hi);
    Rational s = 1 / p.b_hi;
    // Right ends are inverse powers of two.
    while (s < 1) s *= 2;
    while (s > 1) s /= 2;
    CHECK(s == 1);
  }
  CHECK(curve.contains(1));
  CHECK(curve.contains(q("1/4")));
}

TEST_CASE("single machine curve diverges") {
  const auto instance = Instance::from_values(qs({"2"}), qs({"1", "3"}));
  const auto curve = workload_curve(instance, MechanismSpec::ppr_with_base(2), MachineId{0});
  for (const auto& p : curve.pieces()) CHECK(p.load == 4);
  CHECK(curve.diverges());
  CHECK(payment(curve, q("1/2")).truncated);
}

TEST_CASE("curve loads match reruns of the reference simulation") {
  const auto instance = unit_instance(qs({"1", "1"}), 6);
  const auto curve = workload_curve(instance, MechanismSpec::ppr_with_base(2), MachineId{1});
  const auto rank = [&] {
    const auto order = fixed_ordering(instance.seed, 2);
    return std::vector<std::size_t>{order.rank(MachineId{0}), order.rank(MachineId{1})};
  }();
  for (const auto& p : curve.pieces()) {
    Instance probe = instance;
    probe.machines[1].claimed_speed = 1 / p.b_hi;
    CHECK(p.load == oracle::reference_ppr(probe, 2, rank).workloads[1]);
  }
  CHECK(curve.is_non_increasing());
}

TEST_CASE("payments agree with midpoint integration") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto instance = testing_support::small_random(seed * 3 + 2, 4, 8);
    const auto curve = workload_curve(instance, MechanismSpec::ppr_with_base(2), MachineId{0});
    for (const auto& b : curve.breakpoints()) {
      CHECK(payment(curve, b).value == midpoint_payment(curve, b));
    }
  }
}

TEST_CASE("truth maximizes utility for unit jobs") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    FamilySpec spec;
    spec.family = Family::Unit;
    spec.m = 2 + seed % 5;
    spec.n = 3 + seed % 12;
    spec.seed = seed;
    spec.speed_max = 8;
    const Instance instance = generate(spec);
    for (std::size_t i = 0; i < instance.machine_count(); ++i) {
      const auto curve = workload_curve(instance, MechanismSpec::ppr_with_base(2), MachineId{i});
      REQUIRE(curve.is_non_increasing());
      if (curve.diverges()) continue;
      const Rational truth = 1 / instance.machines[i].true_speed;
      const Rational honest = utility(curve, truth, truth);
      for (const auto& b : curve.breakpoints()) CHECK(utility(curve, b, truth) <= honest);
      for (const auto& row : payment_table(curve)) CHECK(row.utility_best_lie <= row.utility_truth);
    }
  }
}

TEST_CASE("unrounded curves are sampled and contain the true bid") {
  const auto instance = unit_instance(qs({"1", "3"}), 4);
  CurveOptions options;
  options.grid_points = 16;
  const auto curve = workload_curve(instance, MechanismSpec::ppr_with_base(1), MachineId{1}, options);
  const auto bps = curve.breakpoints();
  CHECK(std::find(bps.begin(), bps.end(), q("1/3")) != bps.end());
  CHECK(curve.contains(curve.domain_min()));
}

TEST_CASE("parallel curve equals serial curve") {
  const auto instance = testing_support::small_random(11, 6, 20);
  CurveOptions serial, parallel;
  parallel.execution = Execution::Parallel;
  for (const char* base : {"1", "2"}) {
    const auto spec = MechanismSpec::ppr_with_base(q(base));
    const auto a = workload_curve(instance, spec, MachineId{0}, serial);
    const auto b = workload_curve(instance, spec, MachineId{0}, parallel);
    REQUIRE(a.pieces().size() == b.pieces().size());
    for (std::size_t k = 0; k < a.pieces().size(); ++k) {
      CHECK(a.pieces()[k].load == b.pieces()[k].load);
      CHECK(a.pieces()[k].b_hi == b.pieces()[k].b_hi);
    }
  }
}
