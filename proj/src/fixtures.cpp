#include "cakecut/fixtures.hpp"

#include <algorithm>
#include <cctype>

namespace cakecut::fixtures {
namespace {

// One lab table: column ranges are 1-indexed inclusive pixel ranges "a-b",
// rows are 0/1 desire flags per agent (subject first).
struct Table {
  std::string_view name;
  std::vector<std::pair<int, int>> columns;
  std::vector<std::vector<int>> rows;
};

const std::vector<Table>& tables() {
  static const std::vector<Table> kTables = {
      {"2acc",
       {{61, 120}, {121, 130}, {171, 190}, {291, 310}, {411, 430}, {451, 540}},
       {{1, 0, 1, 1, 1, 0}, {0, 1, 0, 0, 1, 1}}},
      {"2scc",
       {{141, 170}, {191, 220}, {231, 240}, {241, 260}, {271, 300}, {311, 320}, {321, 330}, {361, 390},
        {471, 490}, {511, 540}},
       {{0, 0, 1, 1, 1, 1, 0, 0, 1, 1}, {1, 1, 1, 0, 0, 1, 1, 1, 0, 0}}},
      {"3ds",
       {{71, 110}, {121, 130}, {131, 150}, {151, 160}, {171, 180}, {191, 200}, {271, 310}, {311, 380},
        {411, 430}, {451, 540}},
       {{1, 1, 1, 1, 0, 0, 1, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0, 0, 1, 1}, {0, 1, 1, 0, 1, 1, 0, 1, 0, 0}}},
      {"4ds",
       {{61, 80}, {81, 90}, {91, 120}, {141, 150}, {151, 170}, {171, 180}, {181, 210}, {211, 240},
        {241, 270}, {271, 300}, {301, 330}, {331, 360}, {371, 390}, {391, 420}, {421, 450}, {451, 480},
        {491, 510}, {511, 540}},
       {{1, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0},
        {1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0},
        {0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0},
        {0, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1}}},
      {"3ld",
       {{71, 90}, {91, 110}, {121, 190}, {221, 230}, {231, 260}, {281, 300}, {301, 320}, {341, 350},
        {351, 370}, {371, 400}, {401, 410}, {431, 440}, {451, 460}},
       {{0, 1, 0, 1, 1, 1, 0, 1, 1, 0, 1, 0, 0},
        {1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1, 1}}},
      {"4ld",
       {{61, 90}, {91, 110}, {111, 160}, {181, 230}, {231, 250}, {251, 270}, {271, 280}, {281, 290},
        {311, 340}, {341, 350}, {351, 370}, {371, 380}, {381, 410}, {421, 520}},
       {{1, 0, 0, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0},
        {0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0},
        {0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 1, 0},
        {0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}}},
      {"4ep",
       {{91, 110}, {111, 120}, {121, 140}, {161, 170}, {171, 190}, {191, 210}, {211, 220}, {221, 240},
        {241, 270}, {281, 300}, {301, 320}, {331, 340}, {341, 350}, {351, 360}, {361, 370}, {411, 430},
        {471, 510}},
       {{1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0},
        {0, 1, 1, 0, 1, 1, 0, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0},
        {0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 1, 1, 1, 0},
        {0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 0, 1}}},
      {"3sc",
       {{71, 80}, {81, 90}, {91, 100}, {101, 110}, {141, 150}, {151, 170}, {171, 190}, {211, 230},
        {271, 280}, {281, 290}, {291, 300}, {301, 320}, {321, 330}, {331, 340}, {381, 400}, {451, 470},
        {471, 490}},
       {{0, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1, 1},
        {0, 1, 0, 1, 1, 1, 0, 0, 1, 1, 0, 1, 0, 1, 0, 0, 1},
        {1, 1, 1, 1, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 1}}},
  };
  return kTables;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

const std::vector<std::string>& lab_profile_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const auto& t : tables()) names.emplace_back(t.name);
    return names;
  }();
  return kNames;
}

Profile lab_profile(std::string_view name) {
  const auto key = lower(name);
  for (const auto& t : tables()) {
    if (t.name != key) continue;
    Profile p;
    p.width = kLabWidth;
    for (const auto& row : t.rows) {
      std::vector<WeightedInterval> w;
      for (std::size_t c = 0; c < row.size(); ++c)
        if (row[c]) w.push_back({t.columns[c].first - 1, t.columns[c].second, 1});
      p.agents.emplace_back(kLabWidth, std::move(w));
    }
    return p;
  }
  throw Error("unknown lab profile '" + std::string(name) + "'");
}

Profile envy_manipulation_profile() {
  constexpr Pixel kPart = 100;
  auto parts = [](std::initializer_list<Points> densities) {
    std::vector<WeightedInterval> w;
    Pixel at = 0;
    for (Points d : densities) {
      if (d > 0) w.push_back({at, at + kPart, d});
      at += kPart;
    }
    return Valuation(6 * kPart, std::move(w));
  };
  Profile p;
  p.width = 6 * kPart;
  p.agents.push_back(parts({0, 40, 1, 39, 1, 39}));
  p.agents.push_back(parts({20, 20, 40, 0, 40, 0}));
  p.agents.push_back(parts({20, 20, 40, 0, 40, 0}));
  return p;
}

Profile block_profile(int agents, Pixel width) {
  if (agents < 2) throw Error("block profile needs at least 2 agents");
  Profile p;
  p.width = width;
  for (int i = 0; i < agents; ++i) {
    const Pixel a = width * i / agents;
    const Pixel b = width * (i + 1) / agents;
    p.agents.emplace_back(width, std::vector<WeightedInterval>{{a, b, 1}});
  }
  return p;
}

Profile tightness_profile(std::string_view procedure_id) {
  const auto id = lower(procedure_id);
  if (id == "2scc") {
    // Agent 0 splits its value between a wide block and a 2-pixel block just
    // left of the middle; agent 1 only values two 2-pixel blocks right of it.
    constexpr Pixel kEps = 2;
    constexpr Pixel kMid = kLabWidth / 2;
    Profile p;
    p.width = kLabWidth;
    p.agents.emplace_back(kLabWidth, std::vector<WeightedInterval>{
                                         {0, kLabWidth / 4, 1},
                                         {kMid - 2 * kEps, kMid - kEps, (kLabWidth / 4) / kEps}});
    p.agents.emplace_back(kLabWidth, std::vector<WeightedInterval>{{kMid, kMid + kEps, 1},
                                                                   {kMid + kEps, kMid + 2 * kEps, 1}});
    return p;
  }
  if (id.size() < 2 || !std::isdigit(static_cast<unsigned char>(id[0])))
    throw Error("unknown procedure '" + std::string(procedure_id) + "'");
  return block_profile(id[0] - '0');
}

}  // namespace cakecut::fixtures
