#include "loadbal/payments.hpp"

#include <algorithm>
#include <cmath>

#include "loadbal/error.hpp"

namespace loadbal {

WorkloadCurve::WorkloadCurve(std::vector<CurvePiece> pieces, bool includes_min)
    : pieces_(std::move(pieces)), includes_min_(includes_min) {
  if (pieces_.empty()) throw InvalidInput("workload curve needs at least one piece");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& p = pieces_[k];
    if (p.b_lo > p.b_hi || sgn(p.b_lo) < 0) throw InvalidInput("curve piece has a bad interval");
    if (sgn(p.load) < 0) throw InvalidInput("curve piece has negative load");
    if (k > 0) {
      if (p.b_lo != pieces_[k - 1].b_hi) throw InvalidInput("curve pieces are not contiguous");
      if (p.b_hi <= pieces_[k - 1].b_hi) throw InvalidInput("curve breakpoints must increase");
    }
  }
}

bool WorkloadCurve::contains(const Rational& b) const {
  if (b > domain_max()) return false;
  return includes_min_ ? b >= domain_min() : b > domain_min();
}

const Rational& WorkloadCurve::load_at(const Rational& b) const {
  if (!contains(b)) throw RangeError("bid " + to_string(b) + " outside the curve domain");
  // First piece whose right end is >= b.
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), b,
                             [](const CurvePiece& p, const Rational& v) { return p.b_hi < v; });
  return it->load;
}

bool WorkloadCurve::is_non_increasing() const {
  for (std::size_t k = 1; k < pieces_.size(); ++k) {
    if (pieces_[k].load > pieces_[k - 1].load) return false;
  }
  return true;
}

std::vector<Rational> WorkloadCurve::breakpoints() const {
  std::vector<Rational> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) out.push_back(p.b_hi);
  return out;
}

namespace {

Rational final_workload(const Instance& base, const MechanismSpec& mechanism,
                        const TieBreakOrder& order, MachineId machine, const Rational& speed) {
  Instance probe = base;
  probe.machines.at(machine.index).claimed_speed = speed;
  MechanismSpec quiet = mechanism;
  quiet.ppr.record_trace = false;
  return run_mechanism(probe, quiet, order).state.machine(machine).workload;
}

}  // namespace

WorkloadCurve workload_curve(const Instance& instance, const MechanismSpec& mechanism,
                             MachineId machine, const CurveOptions& options) {
  instance.validate();
  if (machine.index >= instance.machine_count()) {
    throw StructuralError("unknown machine id " + std::to_string(machine.index));
  }
  const TieBreakOrder order = fixed_ordering(instance.seed, instance.machine_count());
  const Rational truthful_b = 1 / instance.machines[machine.index].true_speed;
  Rational max_speed(0);
  for (const auto& m : instance.machines) max_speed = std::max(max_speed, m.claimed_speed);
  Rational b_min = options.b_min.value_or(Rational(1 / (4 * max_speed)));
  if (truthful_b / 4 < b_min && !options.b_min) b_min = truthful_b / 4;
  Rational b_max = options.b_max.value_or(Rational(pow(Rational(2), 20) * truthful_b));
  if (!is_positive(b_min) || b_min >= b_max) throw InvalidInput("bad bid range for workload curve");

  const Rational base = mechanism.rounding_base();
  std::vector<CurvePiece> pieces;
  bool includes_min = false;
  std::vector<Rational> speeds;  // claimed speed per piece
  if (base > 1) {
    // Claimed speed in [base^k, base^(k+1)) announces base^k, i.e. a constant
    // load on b in (1 / base^(k+1), 1 / base^k].
    Rational speed = round_speed(1 / b_min, base);
    while (true) {
      Rational lo = 1 / (speed * base);
      Rational hi = 1 / speed;
      pieces.push_back(CurvePiece{lo, hi, Rational(0)});
      speeds.push_back(speed);
      if (hi >= b_max) break;
      speed /= base;
    }
  } else {
    // Geometric grid b_min * r^t, t = 0..n-1, ending exactly at b_max; the
    // truthful b is inserted so the true type is always on the grid.
    std::vector<Rational> grid;
    const std::size_t n = std::max<std::size_t>(options.grid_points, 2);
    double ratio = std::pow(to_double(Rational(b_max / b_min)), 1.0 / static_cast<double>(n - 1));
    for (std::size_t t = 0; t + 1 < n; ++t) {
      Rational b = b_min * Rational(std::pow(ratio, static_cast<double>(t)));
      if (grid.empty() || b > grid.back()) grid.push_back(b);
    }
    if (b_max > grid.back()) grid.push_back(b_max);
    if (truthful_b > b_min && truthful_b < b_max) grid.push_back(truthful_b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    includes_min = true;
    pieces.push_back(CurvePiece{grid[0], grid[0], Rational(0)});
    speeds.push_back(1 / grid[0]);
    for (std::size_t t = 1; t < grid.size(); ++t) {
      pieces.push_back(CurvePiece{grid[t - 1], grid[t], Rational(0)});
      speeds.push_back(1 / grid[t]);
    }
  }

  for_each_index(pieces.size(), options.execution, [&](std::size_t k) {
    pieces[k].load = final_workload(instance, mechanism, order, machine, speeds[k]);
  });
  return WorkloadCurve(std::move(pieces), includes_min);
}

Payment payment(const WorkloadCurve& curve, const Rational& b) {
  Payment out;
  out.value = b * curve.load_at(b);
  for (const auto& p : curve.pieces()) {
    if (p.b_hi <= b) continue;
    const Rational& from = p.b_lo > b ? p.b_lo : b;
    out.value += p.load * (p.b_hi - from);
  }
  out.truncated = curve.diverges();
  return out;
}

Rational utility(const WorkloadCurve& curve, const Rational& b_claimed, const Rational& b_true) {
  return payment(curve, b_claimed).value - b_true * curve.load_at(b_claimed);
}

std::vector<PaymentRow> payment_table(const WorkloadCurve& curve) {
  auto bids = curve.breakpoints();
  std::vector<PaymentRow> rows;
  rows.reserve(bids.size());
  for (const auto& b : bids) {
    PaymentRow row;
    row.b = b;
    row.load = curve.load_at(b);
    row.payment = payment(curve, b);
    row.utility_truth = row.payment.value - b * row.load;
    bool first = true;
    for (const auto& lie : bids) {
      if (lie == b) continue;
      Rational u = utility(curve, lie, b);
      if (first || u > row.utility_best_lie) row.utility_best_lie = u;
      first = false;
    }
    if (first) row.utility_best_lie = row.utility_truth;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace loadbal
