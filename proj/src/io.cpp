#include "cakecut/io.hpp"

#include <fstream>
#include <sstream>

#include "cakecut/fixtures.hpp"

namespace cakecut::io {

Json to_json(const Profile& profile) {
  Json agents = Json::array();
  for (const auto& v : profile.agents) {
    Json w = Json::array();
    for (const auto& wi : v.weights()) w.push_back({wi.start, wi.end, wi.weight});
    agents.push_back({{"weights", w}});
  }
  return {{"cake_pixels", profile.width}, {"agents", agents}};
}

Profile profile_from_json(const Json& j) {
  try {
    Profile p;
    p.width = j.value("cake_pixels", kLabWidth);
    for (const auto& a : j.at("agents")) {
      std::vector<WeightedInterval> ws;
      for (const auto& w : a.at("weights")) {
        if (!w.is_array() || w.size() != 3) throw Error("weights entries are [start, end, weight]");
        ws.push_back({w[0].get<Pixel>(), w[1].get<Pixel>(), w[2].get<Points>()});
      }
      p.agents.emplace_back(p.width, std::move(ws));
    }
    if (p.agents.empty()) throw Error("profile has no agents");
    return p;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed profile: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Profile load_profile(const std::string& name_or_path) {
  if (!std::filesystem::exists(name_or_path)) {
    if (name_or_path == "envy") return fixtures::envy_manipulation_profile();
    return fixtures::lab_profile(name_or_path);
  }
  Json j;
  try {
    j = Json::parse(read_file(name_or_path));
  } catch (const Json::parse_error& e) {
    throw Error(name_or_path + ": " + e.what());
  }
  return profile_from_json(j);
}

Json to_json(const Interval& iv) { return {iv.start, iv.end}; }

Json to_json(const Piece& piece) {
  Json out = Json::array();
  for (const auto& iv : piece.intervals()) out.push_back(to_json(iv));
  return out;
}

Json to_json(const Query& q) {
  Json j{{"kind", to_string(q.kind)},
         {"agent", q.agent},
         {"range", to_json(q.range)},
         {"remaining", to_json(q.remaining)},
         {"active", q.active}};
  if (q.kind == QueryKind::Diminish) j["standing_cut"] = q.standing_cut;
  if (!q.options.empty()) {
    Json opts = Json::array();
    for (const auto& o : q.options) opts.push_back(to_json(o));
    j["options"] = opts;
  }
  return j;
}

Json action_value(QueryKind kind, const Action& a) {
  switch (kind) {
    case QueryKind::Cut:
      return a.cuts.at(0);
    case QueryKind::CutPair:
      return {a.cuts.at(0), a.cuts.at(1)};
    case QueryKind::Choose:
      return a.choice.value();
    case QueryKind::Diminish:
      return a.is_pass() ? Json(nullptr) : Json(a.cuts.at(0));
    case QueryKind::Trim:
      return {a.choice.value(), a.cuts.at(0)};
  }
  return nullptr;
}

Action action_from_value(QueryKind kind, const Json& v) {
  try {
    switch (kind) {
      case QueryKind::Cut:
        return Action::cut(v.get<Pixel>());
      case QueryKind::CutPair:
        return Action::cut_pair(v.at(0).get<Pixel>(), v.at(1).get<Pixel>());
      case QueryKind::Choose:
        return Action::choose(v.get<int>());
      case QueryKind::Diminish:
        return v.is_null() ? Action::pass() : Action::cut(v.get<Pixel>());
      case QueryKind::Trim:
        return Action::trim(v.at(0).get<int>(), v.at(1).get<Pixel>());
    }
  } catch (const Json::exception& e) {
    throw Error("bad " + std::string(to_string(kind)) + " value " + v.dump() + ": " + e.what());
  }
  throw Error("unknown query kind");
}

Action action_from_request(const Json& body) {
  if (!body.is_object()) throw Error("action must be a JSON object");
  try {
    Action a;
    if (body.value("pass", false)) return Action::pass();
    if (body.contains("cuts")) a.cuts = body.at("cuts").get<std::vector<Pixel>>();
    if (body.contains("cut")) a.cuts.push_back(body.at("cut").get<Pixel>());
    if (body.contains("choice")) a.choice = body.at("choice").get<int>();
    if (body.contains("piece")) a.choice = body.at("piece").get<int>();
    if (a.is_pass()) throw Error("action needs cut, cuts, choice, piece or pass");
    return a;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed action: ") + e.what());
  }
}

}  // namespace cakecut::io
