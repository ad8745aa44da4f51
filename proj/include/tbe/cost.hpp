#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace tbe {

/// Cost magnitudes are plain doubles. Integer WCSP costs stay exact up to
/// 2^53. Each task has its own absorbing "forbidden" element (see `top()`).
using Cost = double;

enum class TaskKind { MinSum, MaxProduct };

// Semiring policies. Kernels are instantiated once per policy so the inner
// loops carry no runtime dispatch.

struct MinSumOps {
  static constexpr Cost identity() { return 0.0; }
  static constexpr Cost top() { return std::numeric_limits<Cost>::infinity(); }
  // IEEE addition saturates: finite + inf = inf, and large finite sums overflow to inf.
  static Cost combine(Cost a, Cost b) { return a + b; }
  static Cost marginalize(Cost a, Cost b) { return b < a ? b : a; }
  static bool better(Cost a, Cost b) { return a < b; }
};

struct MaxProductOps {
  static constexpr Cost identity() { return 1.0; }
  static constexpr Cost top() { return 0.0; }
  static Cost combine(Cost a, Cost b) { return a * b; }
  static Cost marginalize(Cost a, Cost b) { return b > a ? b : a; }
  static bool better(Cost a, Cost b) { return a > b; }
};

/// Max-product over natural logarithms of probabilities.
struct MaxLogOps {
  static constexpr Cost identity() { return 0.0; }
  static constexpr Cost top() { return -std::numeric_limits<Cost>::infinity(); }
  static Cost combine(Cost a, Cost b) { return a + b; }
  static Cost marginalize(Cost a, Cost b) { return b > a ? b : a; }
  static bool better(Cost a, Cost b) { return a > b; }
};

/// Selects the (combine, marginalize) pair of a task: (+, min) for WCSPs,
/// (*, max) or (+log, max) for MPE.
class Semiring {
 public:
  constexpr Semiring() = default;

  static constexpr Semiring min_sum() { return Semiring(TaskKind::MinSum, false); }
  static constexpr Semiring max_product(bool log_domain = true) {
    return Semiring(TaskKind::MaxProduct, log_domain);
  }

  constexpr TaskKind kind() const { return kind_; }
  constexpr bool log_domain() const { return log_domain_; }
  constexpr bool minimizes() const { return kind_ == TaskKind::MinSum; }

  /// Calls `f` with the policy object of this semiring.
  template <class F>
  decltype(auto) visit(F&& f) const {
    if (kind_ == TaskKind::MinSum) return std::forward<F>(f)(MinSumOps{});
    if (log_domain_) return std::forward<F>(f)(MaxLogOps{});
    return std::forward<F>(f)(MaxProductOps{});
  }

  Cost identity() const {
    return visit([](auto ops) { return decltype(ops)::identity(); });
  }
  Cost top() const {
    return visit([](auto ops) { return decltype(ops)::top(); });
  }
  Cost combine(Cost a, Cost b) const {
    return visit([&](auto ops) { return decltype(ops)::combine(a, b); });
  }
  Cost marginalize(Cost a, Cost b) const {
    return visit([&](auto ops) { return decltype(ops)::marginalize(a, b); });
  }
  /// Strict preference: `a` is a better objective value than `b`.
  bool better(Cost a, Cost b) const {
    return visit([&](auto ops) { return decltype(ops)::better(a, b); });
  }
  bool is_top(Cost v) const { return v == top(); }

  /// Converts a probability into this semiring's representation.
  Cost from_probability(double p) const {
    return log_domain_ ? (p <= 0.0 ? top() : std::log(p)) : p;
  }
  /// Inverse of `from_probability` (MaxProduct only).
  double to_probability(Cost v) const { return log_domain_ ? std::exp(v) : v; }

  std::string name() const {
    if (kind_ == TaskKind::MinSum) return "min-sum";
    return log_domain_ ? "max-product(log)" : "max-product";
  }

  friend constexpr bool operator==(const Semiring&, const Semiring&) = default;

 private:
  constexpr Semiring(TaskKind kind, bool log_domain) : kind_(kind), log_domain_(log_domain) {}

  TaskKind kind_ = TaskKind::MinSum;
  bool log_domain_ = false;
};

}  // namespace tbe
