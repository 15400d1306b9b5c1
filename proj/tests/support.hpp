#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "cakecut/core.hpp"
#include "cakecut/procedures.hpp"

namespace testing {

using namespace cakecut;

// 0/1 valuation desiring `count` distinct pixels drawn uniformly.
inline Valuation random_pixels(std::mt19937_64& rng, Pixel width = kLabWidth, int count = 120) {
  std::vector<Pixel> px(static_cast<std::size_t>(width));
  std::iota(px.begin(), px.end(), 0);
  std::shuffle(px.begin(), px.end(), rng);
  px.resize(static_cast<std::size_t>(count));
  std::sort(px.begin(), px.end());
  std::vector<Interval> ivs;
  for (Pixel p : px) {
    if (!ivs.empty() && ivs.back().end == p)
      ivs.back().end = p + 1;
    else
      ivs.push_back({p, p + 1});
  }
  return Valuation::desired(width, ivs);
}

inline Profile random_profile(std::mt19937_64& rng, int agents, Pixel width = kLabWidth, int count = 120) {
  Profile p{width, {}};
  for (int i = 0; i < agents; ++i) p.agents.push_back(random_pixels(rng, width, count));
  return p;
}

// Strictly positive integer weights per pixel.
inline Valuation random_positive(std::mt19937_64& rng, Pixel width, Points max_weight = 5) {
  std::uniform_int_distribution<Points> w(1, max_weight);
  std::vector<WeightedInterval> ws;
  for (Pixel p = 0; p < width; ++p) ws.push_back({p, p + 1, w(rng)});
  return Valuation(width, ws);
}

inline Piece random_piece(std::mt19937_64& rng, Pixel width, int max_intervals = 4) {
  std::uniform_int_distribution<Pixel> pos(0, width);
  std::uniform_int_distribution<int> count(0, max_intervals);
  std::vector<Interval> ivs;
  for (int k = count(rng); k > 0; --k) {
    Pixel a = pos(rng), b = pos(rng);
    ivs.push_back({std::min(a, b), std::max(a, b)});
  }
  return Piece(ivs);
}

inline std::vector<PolicyPtr> truthful_policies(const Profile& p) {
  std::vector<PolicyPtr> out;
  for (const auto& v : p.agents) out.push_back(truthful_policy(v));
  return out;
}

}  // namespace testing
