#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace bvmlab {

/// Parameter-space description shared by families, losses and the optimizer.
///
/// kBox:           lower_k (<)= x_k (<)= upper_k, strictness set by `closed`.
/// kReducedSimplex: x_k >= 0 and sum_k x_k <= 1 (first d-1 simplex coordinates).
/// kSimplex:        x_k >= 0 and sum_k x_k = 1 within 1e-9.
struct Domain {
  enum class Kind { kBox, kReducedSimplex, kSimplex };

  Kind kind = Kind::kBox;
  std::vector<double> lower;
  std::vector<double> upper;
  bool closed = false;

  static Domain open_box(std::vector<double> lower, std::vector<double> upper) {
    return {Kind::kBox, std::move(lower), std::move(upper), false};
  }
  static Domain closed_box(std::vector<double> lower, std::vector<double> upper) {
    return {Kind::kBox, std::move(lower), std::move(upper), true};
  }
  static Domain positive_half_line() {
    return open_box({0.0}, {std::numeric_limits<double>::infinity()});
  }
  static Domain whole_space(std::size_t d) {
    return open_box(std::vector<double>(d, -std::numeric_limits<double>::infinity()),
                    std::vector<double>(d, std::numeric_limits<double>::infinity()));
  }
  static Domain reduced_simplex(std::size_t d) {
    return {Kind::kReducedSimplex, std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), true};
  }
  static Domain simplex(std::size_t d) {
    return {Kind::kSimplex, std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), true};
  }

  std::size_t dim() const { return lower.size(); }

  bool contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!(x[k] == x[k])) return false;
      if (closed ? (x[k] < lower[k] || x[k] > upper[k]) : (x[k] <= lower[k] || x[k] >= upper[k])) {
        return false;
      }
      sum += x[k];
    }
    if (kind == Kind::kReducedSimplex) return sum <= 1.0 + 1e-12;
    if (kind == Kind::kSimplex) return sum >= 1.0 - 1e-9 && sum <= 1.0 + 1e-9;
    return true;
  }

  /// Moves x onto the domain: clamp to the box, then for the reduced simplex
  /// scale back the excess over 1. Returns true if x changed.
  bool clamp(std::span<double> x, double margin = 0.0) const {
    bool changed = false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double lo = lower[k] + margin;
      const double hi = upper[k] - margin;
      if (x[k] < lo) {
        x[k] = lo;
        changed = true;
      } else if (x[k] > hi) {
        x[k] = hi;
        changed = true;
      }
    }
    if (kind == Kind::kReducedSimplex) {
      double sum = 0.0;
      for (double v : x) sum += v;
      const double cap = 1.0 - margin;
      if (sum > cap) {
        for (double& v : x) v *= cap / sum;
        changed = true;
      }
    }
    return changed;
  }
};

}  // namespace bvmlab
