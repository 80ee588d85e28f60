#pragma once

#include <optional>
#include <vector>

#include "loadbal/mechanism.hpp"
#include "loadbal/parallel.hpp"

namespace loadbal {

// L(b) == load for b in (b_lo, b_hi].
struct CurvePiece {
  Rational b_lo;
  Rational b_hi;
  Rational load;
};

// Piecewise-constant workload of one machine as a function of its claimed
// inverse speed b. The domain is (domain_min, domain_max], closed on the left
// when `includes_min` is set (sampled curves start with a zero-width piece).
class WorkloadCurve {
 public:
  WorkloadCurve() = default;
  // Throws InvalidInput unless the pieces are contiguous, ordered, with
  // b_lo <= b_hi, strictly increasing right ends and nonnegative loads.
  WorkloadCurve(std::vector<CurvePiece> pieces, bool includes_min);

  const std::vector<CurvePiece>& pieces() const { return pieces_; }
  const Rational& domain_min() const { return pieces_.front().b_lo; }
  const Rational& domain_max() const { return pieces_.back().b_hi; }
  bool contains(const Rational& b) const;
  // Throws RangeError outside the domain.
  const Rational& load_at(const Rational& b) const;
  // L(domain_max) > 0: the payment integral would not converge.
  bool diverges() const { return sgn(pieces_.back().load) > 0; }
  bool is_non_increasing() const;
  // Right end of every piece: one representative bid per constant piece.
  std::vector<Rational> breakpoints() const;

 private:
  std::vector<CurvePiece> pieces_;
  bool includes_min_ = false;
};

struct CurveOptions {
  // Bid range in inverse speed; unset bounds default to
  // [1 / (4 * max speed), 2^20 * truthful b].
  std::optional<Rational> b_min;
  std::optional<Rational> b_max;
  // Sample count for mechanisms without speed rounding.
  std::size_t grid_points = 64;
  Execution execution = Execution::Serial;
};

// Reruns the mechanism with `machine` claiming speed 1/b. For a rounding base
// above 1 each piece corresponds to one announced power of the base, so the
// curve is exact; otherwise it is sampled on a geometric grid.
WorkloadCurve workload_curve(const Instance& instance, const MechanismSpec& mechanism,
                             MachineId machine, const CurveOptions& options = {});

struct Payment {
  Rational value;
  bool truncated = false;  // the tail integral was cut at domain_max
};

// b * L(b) + integral of L over [b, domain_max].
Payment payment(const WorkloadCurve& curve, const Rational& b);

// payment(b_claimed) - b_true * L(b_claimed).
Rational utility(const WorkloadCurve& curve, const Rational& b_claimed, const Rational& b_true);

struct PaymentRow {
  Rational b;
  Rational load;
  Payment payment;
  Rational utility_truth;     // utility(b, b)
  Rational utility_best_lie;  // max over other breakpoints b' of utility(b', b)
};

// One row per breakpoint of the curve, treating that breakpoint as the true type.
std::vector<PaymentRow> payment_table(const WorkloadCurve& curve);

}  // namespace loadbal
