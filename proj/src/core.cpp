#include "cakecut/core.hpp"

#include <algorithm>

namespace cakecut {

Valuation::Valuation(Pixel width, std::vector<WeightedInterval> weights)
    : width_(width), weights_(std::move(weights)) {
  if (width_ < 2) throw Error("cake width must be at least 2 pixels");
  std::vector<Points> density(static_cast<std::size_t>(width_), 0);
  for (const auto& w : weights_) {
    if (w.start < 0 || w.end > width_ || w.start >= w.end)
      throw Error("weighted interval [" + std::to_string(w.start) + "," + std::to_string(w.end) +
                  ") is not a non-empty interval inside the cake");
    if (w.weight < 0) throw Error("negative weight");
    for (Pixel p = w.start; p < w.end; ++p) density[static_cast<std::size_t>(p)] += w.weight;
  }
  prefix_.assign(static_cast<std::size_t>(width_) + 1, 0);
  for (std::size_t p = 0; p < density.size(); ++p) prefix_[p + 1] = prefix_[p] + density[p];
}

Valuation Valuation::desired(Pixel width, std::span<const Interval> intervals) {
  std::vector<WeightedInterval> w;
  w.reserve(intervals.size());
  for (const auto& iv : intervals) w.push_back({iv.start, iv.end, 1});
  return Valuation(width, std::move(w));
}

Valuation Valuation::uniform(Pixel width) { return Valuation(width, {{0, width, 1}}); }

Points Valuation::value(Pixel from, Pixel to) const {
  if (from < 0 || to > width_ || from > to)
    throw Error("interval [" + std::to_string(from) + "," + std::to_string(to) + ") outside the cake");
  return prefix_[static_cast<std::size_t>(to)] - prefix_[static_cast<std::size_t>(from)];
}

std::vector<Interval> Valuation::desired_intervals() const {
  std::vector<Interval> out;
  for (Pixel p = 0; p < width_; ++p) {
    if (value(p, p + 1) == 0) continue;
    if (!out.empty() && out.back().end == p)
      out.back().end = p + 1;
    else
      out.push_back({p, p + 1});
  }
  return out;
}

Piece::Piece(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& iv) { return iv.empty(); });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && intervals_.back().end >= iv.start)
      intervals_.back().end = std::max(intervals_.back().end, iv.end);
    else
      intervals_.push_back(iv);
  }
}

Pixel Piece::measure() const {
  Pixel m = 0;
  for (const auto& iv : intervals_) m += iv.length();
  return m;
}

Piece Piece::united(const Piece& other) const {
  auto all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return Piece(std::move(all));
}

bool Piece::overlaps(const Piece& other) const {
  for (const auto& a : intervals_)
    for (const auto& b : other.intervals_)
      if (std::max(a.start, b.start) < std::min(a.end, b.end)) return true;
  return false;
}

bool Allocation::is_partition(Pixel width) const {
  std::vector<Interval> all;
  for (const auto& p : pieces) all.insert(all.end(), p.intervals().begin(), p.intervals().end());
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.start < b.start; });
  Pixel at = 0;
  for (const auto& iv : all) {
    if (iv.start != at) return false;
    at = iv.end;
  }
  return at == width;
}

bool FairnessReport::all_proportional() const {
  return std::all_of(proportional.begin(), proportional.end(), [](bool b) { return b; });
}

bool FairnessReport::envy_free() const {
  return std::none_of(envious.begin(), envious.end(), [](bool b) { return b; });
}

Points value_of(const Valuation& v, const Piece& piece) {
  Points sum = 0;
  for (const auto& iv : piece.intervals()) sum += v.value(iv);
  return sum;
}

Pixel cut_point(const Valuation& v, Pixel from, Points target) {
  if (from < 0 || from > v.width()) throw Error("cut origin outside the cake");
  if (target < 0) throw Error("negative cut target");
  const Points base = v.prefix(from);
  if (v.total() - base < target)
    throw Error("target " + std::to_string(target) + " unreachable from " + std::to_string(from));
  // prefix is non-decreasing: binary search for the first boundary reaching base + target
  Pixel lo = from, hi = v.width();
  while (lo < hi) {
    const Pixel mid = lo + (hi - lo) / 2;
    if (v.prefix(mid) - base >= target)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

Pixel trim_point(const Valuation& v, Pixel from, Pixel to, Points target) {
  if (from < 0 || to > v.width() || from > to) throw Error("trim range outside the cake");
  if (v.value(from, to) < target) throw Error("trim target unreachable");
  Pixel lo = from, hi = to;
  while (lo < hi) {
    const Pixel mid = lo + (hi - lo + 1) / 2;
    if (v.value(mid, to) >= target)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

FairnessReport audit(const Profile& profile, const Allocation& allocation, Points tolerance) {
  const std::size_t n = profile.size();
  if (allocation.agents() != n)
    throw Error("profile has " + std::to_string(n) + " agents but allocation has " +
                std::to_string(allocation.agents()) + " pieces");
  FairnessReport r;
  r.tolerance = tolerance;
  r.envy_matrix.assign(n, std::vector<Points>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.envy_matrix[i][j] = value_of(profile[i], allocation.pieces[j]);
  for (std::size_t i = 0; i < n; ++i) {
    const Points own = r.envy_matrix[i][i];
    r.points.push_back(own);
    r.proportional.push_back(own * static_cast<Points>(n) >= profile[i].total());
    bool envious = false;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && r.envy_matrix[i][j] > own + tolerance) envious = true;
    r.envious.push_back(envious);
  }
  return r;
}

std::vector<std::string> validate_profile(const Profile& profile, ProfileMode mode) {
  std::vector<std::string> out;
  if (profile.width < 2) out.push_back("cake width must be at least 2");
  if (profile.agents.empty()) out.push_back("profile has no agents");
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& v = profile[i];
    const std::string who = "agent " + std::to_string(i) + ": ";
    if (v.width() != profile.width) out.push_back(who + "valuation width differs from cake width");
    auto sorted = v.weights();
    std::sort(sorted.begin(), sorted.end(),
              [](const WeightedInterval& a, const WeightedInterval& b) { return a.start < b.start; });
    for (std::size_t k = 1; k < sorted.size(); ++k)
      if (sorted[k].start < sorted[k - 1].end)
        out.push_back(who + "intervals [" + std::to_string(sorted[k - 1].start) + "," +
                      std::to_string(sorted[k - 1].end) + ") and [" + std::to_string(sorted[k].start) + "," +
                      std::to_string(sorted[k].end) + ") overlap");
    if (v.total() <= 0) out.push_back(who + "total value must be positive");
    if (mode == ProfileMode::Lab) {
      for (const auto& w : v.weights())
        if (w.weight != 0 && w.weight != 1) {
          out.push_back(who + "lab profiles use 0/1 weights");
          break;
        }
      if (v.total() != kLabTotal)
        out.push_back(who + "lab profiles total " + std::to_string(kLabTotal) + " points, got " +
                      std::to_string(v.total()));
    }
  }
  return out;
}

}  // namespace cakecut
