#pragma once

// Discretized cake, piecewise-constant valuations, pieces, allocations and
// fairness auditing.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cakecut {

/// A cut position. Boundary k separates pixel k-1 from pixel k.
using Pixel = int;
using Points = std::int64_t;

inline constexpr Pixel kLabWidth = 600;
inline constexpr Points kLabTotal = 120;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open pixel interval [start, end).
struct Interval {
  Pixel start = 0;
  Pixel end = 0;

  [[nodiscard]] Pixel length() const { return end - start; }
  [[nodiscard]] bool empty() const { return end <= start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct WeightedInterval {
  Pixel start = 0;
  Pixel end = 0;
  Points weight = 0;  // points per pixel
  friend bool operator==(const WeightedInterval&, const WeightedInterval&) = default;
};

/// Additive valuation over a cake of `width` pixels.
///
/// Construction only requires each interval to lie inside the cake with a
/// non-negative weight; overlap and zero totals are reported by
/// validate_profile() instead of being rejected here, so malformed inputs can
/// still be inspected.
class Valuation {
 public:
  Valuation() = default;
  Valuation(Pixel width, std::vector<WeightedInterval> weights);

  /// 0/1 valuation desiring the given intervals.
  static Valuation desired(Pixel width, std::span<const Interval> intervals);
  static Valuation uniform(Pixel width);

  [[nodiscard]] Pixel width() const { return width_; }
  [[nodiscard]] Points total() const { return prefix_.empty() ? 0 : prefix_.back(); }
  [[nodiscard]] const std::vector<WeightedInterval>& weights() const { return weights_; }

  /// Value of [from, to). Requires 0 <= from <= to <= width.
  [[nodiscard]] Points value(Pixel from, Pixel to) const;
  [[nodiscard]] Points value(const Interval& iv) const { return value(iv.start, iv.end); }
  /// Value of [0, x).
  [[nodiscard]] Points prefix(Pixel x) const { return prefix_.at(static_cast<std::size_t>(x)); }

  /// Intervals with positive weight, merged.
  [[nodiscard]] std::vector<Interval> desired_intervals() const;

  friend bool operator==(const Valuation& a, const Valuation& b) {
    return a.width_ == b.width_ && a.weights_ == b.weights_;
  }

 private:
  Pixel width_ = 0;
  std::vector<WeightedInterval> weights_;
  std::vector<Points> prefix_;  // prefix_[k] = value of [0, k)
};

/// Finite union of disjoint half-open intervals, kept sorted with adjacent
/// intervals merged and empty ones dropped.
class Piece {
 public:
  Piece() = default;
  explicit Piece(std::vector<Interval> intervals);
  static Piece of(Pixel start, Pixel end) { return Piece({Interval{start, end}}); }

  [[nodiscard]] const std::vector<Interval>& intervals() const { return intervals_; }
  [[nodiscard]] bool empty() const { return intervals_.empty(); }
  [[nodiscard]] Pixel measure() const;
  [[nodiscard]] Piece united(const Piece& other) const;
  [[nodiscard]] bool overlaps(const Piece& other) const;

  friend bool operator==(const Piece&, const Piece&) = default;

 private:
  std::vector<Interval> intervals_;
};

struct Allocation {
  std::vector<Piece> pieces;  // one per agent, by agent index

  [[nodiscard]] std::size_t agents() const { return pieces.size(); }
  /// Pieces are pairwise disjoint and cover [0, width).
  [[nodiscard]] bool is_partition(Pixel width) const;
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Profile {
  Pixel width = kLabWidth;
  std::vector<Valuation> agents;

  [[nodiscard]] std::size_t size() const { return agents.size(); }
  const Valuation& operator[](std::size_t i) const { return agents.at(i); }
  friend bool operator==(const Profile&, const Profile&) = default;
};

struct FairnessReport {
  std::vector<Points> points;                     // v_i(A_i)
  std::vector<std::vector<Points>> envy_matrix;   // [i][j] = v_i(A_j)
  std::vector<bool> proportional;
  std::vector<bool> envious;
  Points tolerance = 0;

  [[nodiscard]] bool all_proportional() const;
  [[nodiscard]] bool envy_free() const;
};

/// Sum of weights over the pixels of `piece`. Throws Error when the piece
/// leaves the cake.
Points value_of(const Valuation& v, const Piece& piece);

/// Minimal boundary x >= from with value(from, x) >= target. Throws Error when
/// the target is unreachable on [from, width).
Pixel cut_point(const Valuation& v, Pixel from, Points target);

/// Largest boundary x <= to with value(x, to) >= target, i.e. the cut that
/// trims from the left while keeping `target` on the right. Throws Error when
/// unreachable.
Pixel trim_point(const Valuation& v, Pixel from, Pixel to, Points target);

/// Envy is strict: i envies j iff v_i(A_j) > v_i(A_i) + tolerance.
/// Agent i is proportional iff v_i(A_i) * n >= total_i.
FairnessReport audit(const Profile& profile, const Allocation& allocation, Points tolerance = 0);

enum class ProfileMode { General, Lab };

/// Empty result means the profile is valid.
std::vector<std::string> validate_profile(const Profile& profile, ProfileMode mode = ProfileMode::General);

}  // namespace cakecut
