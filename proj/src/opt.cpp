#include "loadbal/opt.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <numeric>

#include "loadbal/error.hpp"
#include "loadbal/pricing.hpp"

namespace loadbal {

std::vector<Rational> oracle_speeds(const Instance& instance, const Rational& rounding_base) {
  std::vector<Rational> speeds;
  speeds.reserve(instance.machine_count());
  for (const auto& m : instance.machines) speeds.push_back(round_speed(m.true_speed, rounding_base));
  return speeds;
}

Rational schedule_makespan(const Instance& instance, const std::vector<Rational>& speeds,
                           const std::vector<MachineId>& assignment) {
  std::vector<Rational> load(speeds.size(), Rational(0));
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    load.at(assignment[j].index) += instance.jobs.at(j).true_size;
  }
  Rational best(0);
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    Rational c = load[i] / speeds[i];
    if (c > best) best = c;
  }
  return best;
}

namespace {

std::vector<std::size_t> jobs_by_decreasing_size(const Instance& instance) {
  std::vector<std::size_t> order(instance.job_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instance.jobs[a].true_size > instance.jobs[b].true_size;
  });
  return order;
}

Rational approx_lower_bound(const Instance& instance, const std::vector<Rational>& speeds) {
  Rational total_size(0), total_speed(0), max_size(0), max_speed(0);
  for (const auto& job : instance.jobs) {
    total_size += job.true_size;
    if (job.true_size > max_size) max_size = job.true_size;
  }
  for (const auto& s : speeds) {
    total_speed += s;
    if (s > max_speed) max_speed = s;
  }
  Rational a = total_size / total_speed;
  Rational b = max_size / max_speed;
  return a > b ? a : b;
}

mpz_class to_mpz(__int128 value) {
  bool negative = value < 0;
  unsigned __int128 u = negative ? static_cast<unsigned __int128>(-value)
                                 : static_cast<unsigned __int128>(value);
  mpz_class high(static_cast<unsigned long>(u >> 64));
  mpz_class low(static_cast<unsigned long>(u & ~0ULL));
  mpz_class r = (high << 64) + low;
  return negative ? mpz_class(-r) : r;
}

mpz_class to_mpz(const mpz_class& value) { return value; }

template <class Int>
Int from_mpz(const mpz_class& value);

template <>
__int128 from_mpz<__int128>(const mpz_class& value) {
  mpz_class high = value >> 64;
  mpz_class low = value - (high << 64);
  return (static_cast<__int128>(high.get_si()) << 64) +
         static_cast<__int128>(static_cast<unsigned __int128>(low.get_ui()));
}

template <>
mpz_class from_mpz<mpz_class>(const mpz_class& value) {
  return value;
}

// num / den with den > 0.
template <class Int>
struct Fraction {
  Int num;
  Int den;
};

template <class Int>
bool less(const Fraction<Int>& a, const Fraction<Int>& b) {
  return a.num * b.den < b.num * a.den;
}

// Q||Cmax search on integer-scaled sizes and speeds. Machines are sorted by
// decreasing speed and jobs by decreasing size before they get here.
template <class Int>
class BranchAndBound {
 public:
  BranchAndBound(std::vector<Int> sizes, std::vector<Int> speeds, Fraction<Int> lower_bound,
                 Fraction<Int> incumbent, std::uint64_t node_budget)
      : sizes_(std::move(sizes)),
        speeds_(std::move(speeds)),
        lower_bound_(std::move(lower_bound)),
        incumbent_(std::move(incumbent)),
        node_budget_(node_budget) {}

  struct Prefix {
    std::vector<std::size_t> machines;  // machine per job, for the first jobs
  };

  struct TaskResult {
    bool improved = false;
    Fraction<Int> value;
    std::vector<std::size_t> assignment;
    bool hit_lower_bound = false;
  };

  // Children of a prefix in search order, pruned against the incumbent only.
  std::vector<Prefix> expand(const Prefix& prefix) const {
    std::vector<Int> load(speeds_.size(), Int(0));
    Fraction<Int> current{Int(0), Int(1)};
    for (std::size_t k = 0; k < prefix.machines.size(); ++k) {
      std::size_t i = prefix.machines[k];
      load[i] += sizes_[k];
      Fraction<Int> c{load[i], speeds_[i]};
      if (less(current, c)) current = c;
    }
    std::vector<Prefix> out;
    std::vector<Candidate> candidates;
    collect(prefix.machines.size(), prefix.machines, load, current, incumbent_, nullptr,
            candidates);
    for (const auto& cand : candidates) {
      Prefix child = prefix;
      child.machines.push_back(cand.machine);
      out.push_back(std::move(child));
    }
    return out;
  }

  // Depth-first search below `prefix`. Prunes with >= against the task's own
  // best (seeded with the global incumbent) and with > against `shared`, so
  // the first optimal leaf in search order is always the one reported.
  TaskResult solve(const Prefix& prefix, const Fraction<Int>* shared, std::size_t task_index,
                   std::atomic<std::size_t>* first_hit) {
    TaskResult result;
    result.value = incumbent_;
    std::vector<Int> load(speeds_.size(), Int(0));
    std::vector<std::size_t> assign(sizes_.size(), 0);
    Fraction<Int> current{Int(0), Int(1)};
    for (std::size_t k = 0; k < prefix.machines.size(); ++k) {
      std::size_t i = prefix.machines[k];
      assign[k] = i;
      load[i] += sizes_[k];
      Fraction<Int> c{load[i], speeds_[i]};
      if (less(current, c)) current = c;
    }
    if (!less(current, incumbent_)) return result;
    Search search{load, assign, result, shared, task_index, first_hit, {}};
    search.frames.resize(sizes_.size() + 1);
    dfs(search, prefix.machines.size(), current);
    return result;
  }

  std::uint64_t nodes() const { return nodes_.load(); }
  bool exhausted() const { return exhausted_.load(); }

 private:
  struct Candidate {
    std::size_t machine;
    Fraction<Int> finish;
    Fraction<Int> new_max;
  };

  struct Frame {
    std::vector<Candidate> candidates;
  };

  struct Search {
    std::vector<Int>& load;
    std::vector<std::size_t>& assign;
    TaskResult& result;
    const Fraction<Int>* shared;
    std::size_t task_index;
    std::atomic<std::size_t>* first_hit;
    std::vector<Frame> frames;
    bool stop = false;
  };

  void collect(std::size_t depth, const std::vector<std::size_t>& assign,
               const std::vector<Int>& load, const Fraction<Int>& current,
               const Fraction<Int>& best, const Fraction<Int>* shared,
               std::vector<Candidate>& out) const {
    out.clear();
    const Int& size = sizes_[depth];
    std::size_t first = 0;
    if (depth > 0 && sizes_[depth] == sizes_[depth - 1]) first = assign[depth - 1];
    for (std::size_t i = first; i < speeds_.size(); ++i) {
      bool duplicate = false;
      for (std::size_t j = i; j-- > first && speeds_[j] == speeds_[i];) {
        if (load[j] == load[i]) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      Fraction<Int> finish{load[i] + size, speeds_[i]};
      const Fraction<Int>& new_max = less(current, finish) ? finish : current;
      if (!less(new_max, best)) continue;
      if (shared != nullptr && less(*shared, new_max)) continue;
      out.push_back(Candidate{i, finish, new_max});
    }
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
      return less(a.finish, b.finish);
    });
  }

  void dfs(Search& s, std::size_t depth, const Fraction<Int>& current) {
    if (s.stop) return;
    if (nodes_.fetch_add(1, std::memory_order_relaxed) >= node_budget_) {
      exhausted_.store(true);
      s.stop = true;
      return;
    }
    if (s.first_hit != nullptr && s.first_hit->load(std::memory_order_relaxed) < s.task_index) {
      s.stop = true;
      return;
    }
    if (depth == sizes_.size()) {
      if (less(current, s.result.value)) {
        s.result.value = current;
        s.result.improved = true;
        s.result.assignment = s.assign;
        if (!less(lower_bound_, current)) {
          s.result.hit_lower_bound = true;
          s.stop = true;
          if (s.first_hit != nullptr) {
            std::size_t seen = s.first_hit->load();
            while (s.task_index < seen && !s.first_hit->compare_exchange_weak(seen, s.task_index)) {
            }
          }
        }
      }
      return;
    }
    auto& candidates = s.frames[depth].candidates;
    collect(depth, s.assign, s.load, current, s.result.value, s.shared, candidates);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      // The incumbent may have improved since the candidates were collected.
      if (!less(candidates[c].new_max, s.result.value)) continue;
      std::size_t i = candidates[c].machine;
      Fraction<Int> next = candidates[c].new_max;
      s.load[i] += sizes_[depth];
      s.assign[depth] = i;
      dfs(s, depth + 1, next);
      s.load[i] -= sizes_[depth];
      if (s.stop) return;
    }
  }

  std::vector<Int> sizes_;
  std::vector<Int> speeds_;
  Fraction<Int> lower_bound_;
  Fraction<Int> incumbent_;
  std::uint64_t node_budget_;
  std::atomic<std::uint64_t> nodes_{0};
  std::atomic<bool> exhausted_{false};
};

struct ScaledProblem {
  std::vector<std::size_t> job_order;      // search position -> job index
  std::vector<std::size_t> machine_order;  // search position -> machine index
  std::vector<mpz_class> sizes;
  std::vector<mpz_class> speeds;
  mpz_class size_scale;
  mpz_class speed_scale;
};

ScaledProblem scale(const Instance& instance, const std::vector<Rational>& speeds) {
  ScaledProblem p;
  p.job_order = jobs_by_decreasing_size(instance);
  p.machine_order.resize(speeds.size());
  std::iota(p.machine_order.begin(), p.machine_order.end(), 0);
  std::stable_sort(p.machine_order.begin(), p.machine_order.end(),
                   [&](std::size_t a, std::size_t b) { return speeds[a] > speeds[b]; });
  p.size_scale = 1;
  for (const auto& job : instance.jobs) {
    mpz_lcm(p.size_scale.get_mpz_t(), p.size_scale.get_mpz_t(), job.true_size.get_den_mpz_t());
  }
  p.speed_scale = 1;
  for (const auto& s : speeds) {
    mpz_lcm(p.speed_scale.get_mpz_t(), p.speed_scale.get_mpz_t(), s.get_den_mpz_t());
  }
  for (std::size_t j : p.job_order) {
    Rational v = instance.jobs[j].true_size * p.size_scale;
    p.sizes.push_back(v.get_num());
  }
  for (std::size_t i : p.machine_order) {
    Rational v = speeds[i] * p.speed_scale;
    p.speeds.push_back(v.get_num());
  }
  return p;
}

template <class Int>
Fraction<Int> scaled_fraction(const Rational& makespan, const ScaledProblem& p) {
  // makespan = W * speed_scale / (S * size_scale), so W / S = makespan * size_scale / speed_scale.
  Rational v = makespan * p.size_scale / p.speed_scale;
  return Fraction<Int>{from_mpz<Int>(v.get_num()), from_mpz<Int>(v.get_den())};
}

template <class Int>
Rational unscale(const Fraction<Int>& f, const ScaledProblem& p) {
  Rational r(to_mpz(f.num) * p.speed_scale, to_mpz(f.den) * p.size_scale);
  r.canonicalize();
  return r;
}

template <class Int>
OptResult search(const Instance& instance, const std::vector<Rational>& speeds,
                 const ScaledProblem& p, const OptResult& approx, const OptOptions& options) {
  std::vector<Int> sizes, machine_speeds;
  for (const auto& v : p.sizes) sizes.push_back(from_mpz<Int>(v));
  for (const auto& v : p.speeds) machine_speeds.push_back(from_mpz<Int>(v));
  BranchAndBound<Int> bnb(std::move(sizes), std::move(machine_speeds),
                          scaled_fraction<Int>(approx.lower_bound, p),
                          scaled_fraction<Int>(approx.upper_bound, p), options.node_budget);

  using Prefix = typename BranchAndBound<Int>::Prefix;
  using TaskResult = typename BranchAndBound<Int>::TaskResult;

  std::vector<TaskResult> results;
  if (options.execution == Execution::Serial) {
    results.push_back(bnb.solve(Prefix{}, nullptr, 0, nullptr));
  } else {
    // Level-by-level expansion keeps the tasks in depth-first order.
    std::vector<Prefix> frontier{Prefix{}};
    const std::size_t wanted = static_cast<std::size_t>(std::max(1, thread_limit())) * 8;
    std::size_t depth = 0;
    while (frontier.size() < wanted && depth < instance.job_count()) {
      std::vector<Prefix> next;
      for (const auto& prefix : frontier) {
        auto children = bnb.expand(prefix);
        for (auto& c : children) next.push_back(std::move(c));
      }
      frontier = std::move(next);
      ++depth;
      if (frontier.empty()) break;
    }
    results.resize(frontier.size());
    std::atomic<std::size_t> first_hit{std::numeric_limits<std::size_t>::max()};
    Fraction<Int> shared = scaled_fraction<Int>(approx.upper_bound, p);
    std::mutex shared_mutex;
    for_each_index(frontier.size(), Execution::Parallel, [&](std::size_t t) {
      Fraction<Int> snapshot;
      {
        std::lock_guard<std::mutex> lock(shared_mutex);
        snapshot = shared;
      }
      results[t] = bnb.solve(frontier[t], &snapshot, t, &first_hit);
      if (results[t].improved) {
        std::lock_guard<std::mutex> lock(shared_mutex);
        if (less(results[t].value, shared)) shared = results[t].value;
      }
    });
  }

  OptResult out;
  out.nodes = bnb.nodes();
  out.lower_bound = approx.lower_bound;
  const TaskResult* best = nullptr;
  for (const auto& r : results) {
    if (r.improved && (best == nullptr || less(r.value, best->value))) best = &r;
  }
  if (best == nullptr) {
    out.value = approx.upper_bound;
    out.witness = approx.witness;
  } else {
    out.value = unscale(best->value, p);
    out.witness.assign(instance.job_count(), MachineId{});
    for (std::size_t k = 0; k < best->assignment.size(); ++k) {
      out.witness[p.job_order[k]] = MachineId{p.machine_order[best->assignment[k]]};
    }
  }
  out.upper_bound = out.value;
  out.exact = !bnb.exhausted();
  if (out.exact) out.lower_bound = out.value;
  if (schedule_makespan(instance, speeds, out.witness) != out.value) {
    throw InvariantViolation("optimum witness does not reproduce the reported makespan");
  }
  return out;
}

}  // namespace

OptResult opt_approx(const Instance& instance, const Rational& rounding_base) {
  instance.validate();
  auto speeds = oracle_speeds(instance, rounding_base);
  OptResult out;
  out.witness.assign(instance.job_count(), MachineId{});
  std::vector<Rational> load(speeds.size(), Rational(0));
  for (std::size_t j : jobs_by_decreasing_size(instance)) {
    const Rational& size = instance.jobs[j].true_size;
    std::size_t best = 0;
    Rational best_finish;
    for (std::size_t i = 0; i < speeds.size(); ++i) {
      Rational finish = (load[i] + size) / speeds[i];
      if (i == 0 || finish < best_finish) {
        best = i;
        best_finish = std::move(finish);
      }
    }
    load[best] += size;
    out.witness[j] = MachineId{best};
  }
  out.upper_bound = schedule_makespan(instance, speeds, out.witness);
  out.lower_bound = instance.jobs.empty() ? Rational(0) : approx_lower_bound(instance, speeds);
  out.value = out.upper_bound;
  out.exact = out.lower_bound == out.upper_bound;
  return out;
}

OptResult opt_exact(const Instance& instance, const Rational& rounding_base,
                    const OptOptions& options) {
  OptResult approx = opt_approx(instance, rounding_base);
  if (approx.exact) return approx;
  // With equal sizes, placing each job where it finishes first is optimal.
  const bool equal_sizes = std::all_of(instance.jobs.begin(), instance.jobs.end(), [&](const Job& j) {
    return j.true_size == instance.jobs.front().true_size;
  });
  if (equal_sizes) {
    approx.exact = true;
    approx.lower_bound = approx.value;
    return approx;
  }
  if (instance.job_count() > options.max_jobs) return approx;

  auto speeds = oracle_speeds(instance, rounding_base);
  ScaledProblem p = scale(instance, speeds);
  mpz_class total(0), top(0);
  for (const auto& v : p.sizes) total += v;
  for (const auto& v : p.speeds) top = std::max(top, v);
  if (mpz_sizeinbase(total.get_mpz_t(), 2) <= 61 && mpz_sizeinbase(top.get_mpz_t(), 2) <= 61) {
    return search<__int128>(instance, speeds, p, approx, options);
  }
  return search<mpz_class>(instance, speeds, p, approx, options);
}

OptSandwich opt2_sandwich(const Instance& instance, const Rational& base,
                          const OptOptions& options) {
  OptSandwich out{opt_exact(instance, Rational(1), options), opt_exact(instance, base, options)};
  const auto& opt = out.opt;
  const auto& opt2 = out.opt_rounded;
  bool ok = opt.exact && opt2.exact
                ? (opt.value <= opt2.value && opt2.value <= base * opt.value)
                : (opt.lower_bound <= opt2.upper_bound && opt2.lower_bound <= base * opt.upper_bound);
  if (!ok) {
    throw InvariantViolation("rounded optimum " + to_string(opt2.value) +
                             " is outside [OPT, base*OPT] for OPT " + to_string(opt.value));
  }
  return out;
}

}  // namespace loadbal
