#include "cakecut/strategy.hpp"

#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "cakecut/fixtures.hpp"

namespace cakecut {
namespace {

bool enumerated(QueryKind k) { return k == QueryKind::Cut || k == QueryKind::CutPair; }

std::vector<Action> enumerate(const Query& q) {
  std::vector<Action> out;
  if (q.kind == QueryKind::Cut) {
    for (Pixel x = q.range.start; x <= q.range.end; ++x) out.push_back(Action::cut(x));
  } else {
    for (Pixel a = q.range.start; a <= q.range.end; ++a)
      for (Pixel b = a; b <= q.range.end; ++b) out.push_back(Action::cut_pair(a, b));
  }
  return out;
}

class Searcher {
 public:
  Searcher(const StrategySpace& space, const Profile& profile) : space_(space), profile_(profile) {}

  // Runs automata and the agent's non-searched answers until the agent faces
  // a searched query or the procedure ends.
  void advance(Protocol& p, int stage) const {
    while (!p.done()) {
      const Query& q = p.pending();
      if (q.agent == space_.role && enumerated(q.kind) && stage < space_.searched_stages) return;
      p.apply(truthful_action(profile_[static_cast<std::size_t>(q.agent)], q));
    }
  }

  Points payoff(const Protocol& p) const {
    const auto r = static_cast<std::size_t>(space_.role);
    return value_of(profile_[r], p.allocation().pieces[r]);
  }

  // Best final payoff from a state whose pending query is a searched one.
  Points solve(const Protocol& p, int stage) {
    auto key = std::to_string(stage) + '#' + p.state_key();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.value;
    Node best{-1, {}};
    for (auto& a : enumerate(p.pending())) {
      Protocol next = p;
      next.apply(a);
      advance(next, stage + 1);
      const Points v = next.done() ? payoff(next) : solve(next, stage + 1);
      if (v > best.value) best = {v, std::move(a)};  // strict: keeps the lexicographically smallest
    }
    memo_.emplace(std::move(key), best);
    return best.value;
  }

  const Action& best_action(const Protocol& p, int stage) const {
    return memo_.at(std::to_string(stage) + '#' + p.state_key()).action;
  }

 private:
  struct Node {
    Points value;
    Action action;
  };
  const StrategySpace& space_;
  const Profile& profile_;
  std::unordered_map<std::string, Node> memo_;
};

}  // namespace

StrategySpace StrategySpace::for_procedure(const Procedure& procedure, int role) {
  const int stages = procedure.subject_stages();
  return {procedure, role, stages <= kFullSearchStages ? stages : 1};
}

BestResponse best_response(const Procedure& procedure, const Profile& profile, int role) {
  return best_response(StrategySpace::for_procedure(procedure, role), profile);
}

BestResponse best_response(const StrategySpace& space, const Profile& profile) {
  if (profile.size() != static_cast<std::size_t>(space.procedure.agents))
    throw Error(space.procedure.id() + " needs " + std::to_string(space.procedure.agents) + " valuations");
  if (space.role < 0 || space.role >= space.procedure.agents) throw Error("role out of range");

  const auto role = static_cast<std::size_t>(space.role);
  BestResponse br;
  br.total = profile[role].total();
  br.truthful_payoff = run_truthful(space.procedure, profile, space.role).trace.points[role];

  Searcher searcher(space, profile);
  Protocol p(space.procedure, profile.width);
  int stage = 0;
  searcher.advance(p, stage);
  if (!p.done()) {
    br.payoff = searcher.solve(p, stage);
    while (!p.done()) {
      br.actions.push_back(searcher.best_action(p, stage));
      p.apply(br.actions.back());
      searcher.advance(p, ++stage);
    }
  }
  br.allocation = p.allocation();
  br.payoff = value_of(profile[role], br.allocation.pieces[role]);
  br.gain = br.payoff - br.truthful_payoff;
  br.envious_at_optimum = audit(profile, br.allocation).envious[role];
  return br;
}

double epsilon_gap(const Procedure& procedure, const Profile& profile, int role) {
  const auto br = best_response(procedure, profile, role);
  return static_cast<double>(br.gain) / static_cast<double>(br.total);
}

std::vector<Outcome> first_round_outcomes(const Procedure& procedure, const Profile& profile, int role) {
  StrategySpace space{procedure, role, 1};
  Searcher searcher(space, profile);
  Protocol p(procedure, profile.width);
  searcher.advance(p, 0);
  std::vector<Outcome> out;
  if (p.done()) return out;
  const auto r = static_cast<std::size_t>(role);
  for (auto& a : enumerate(p.pending())) {
    Protocol next = p;
    next.apply(a);
    searcher.advance(next, 1);
    const Points v = value_of(profile[r], next.allocation().pieces[r]);
    out.push_back({std::move(a), next.allocation(), v});
  }
  return out;
}

GapCheck check_tightness(const Procedure& procedure, const Profile& profile) {
  const auto br = best_response(procedure, profile);
  GapCheck g;
  g.procedure = procedure.id();
  g.payoff = br.payoff;
  g.truthful_payoff = br.truthful_payoff;
  g.total = br.total;
  g.gap = static_cast<double>(br.gain) / static_cast<double>(br.total);
  g.threshold = static_cast<double>(procedure.agents - 1) / procedure.agents - kTightnessSlack;
  g.pass = g.gap >= g.threshold;
  return g;
}

LemmaReport check_envy_manipulation(const Profile& profile) {
  const auto procedure = Procedure::parse("3SC");
  LemmaReport rep;
  rep.lemma = 4;
  const auto br = best_response(procedure, profile);
  rep.truthful_payoff = br.truthful_payoff;
  rep.best_payoff = br.payoff;
  rep.total = br.total;
  rep.envious_at_optimum = br.envious_at_optimum;
  rep.optimum = br.actions;
  for (const auto& o : first_round_outcomes(procedure, profile)) {
    if (o.payoff <= br.truthful_payoff || o.payoff <= rep.witness_payoff) continue;
    if (!audit(profile, o.allocation).envious[0]) continue;
    rep.witness_found = true;
    rep.witness = {o.action};
    rep.witness_payoff = o.payoff;
  }
  rep.pass = rep.witness_found;
  return rep;
}

LemmaReport verify_lemma(int which) {
  if (which == 4) return check_envy_manipulation(fixtures::envy_manipulation_profile());
  if (which != 3) throw Error("verify_lemma takes 3 or 4");
  LemmaReport rep;
  rep.lemma = 3;
  rep.pass = true;
  for (const auto& proc : lab_procedures()) {
    auto g = check_tightness(proc, fixtures::tightness_profile(proc.id()));
    rep.pass = rep.pass && g.pass;
    rep.gaps.push_back(std::move(g));
  }
  return rep;
}

std::string LemmaReport::to_text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  auto cuts = [&](const std::vector<Action>& as) {
    std::string s;
    for (const auto& a : as)
      for (Pixel c : a.cuts) s += (s.empty() ? "" : ",") + std::to_string(c);
    return s;
  };
  if (lemma == 3) {
    os << "manipulation gap on tightness instances\n";
    for (const auto& g : gaps)
      os << "  " << std::setw(5) << std::left << g.procedure << std::right << " gap " << g.gap << " >= " << g.threshold
         << "  (truthful " << g.truthful_payoff << ", best " << g.payoff << " of " << g.total << ")  "
         << (g.pass ? "PASS" : "FAIL") << '\n';
  } else {
    auto scaled = [&](Points p) { return 120.0 * static_cast<double>(p) / static_cast<double>(total); };
    os << "envy under a single manipulation (3SC)\n"
       << "  truthful payoff      " << scaled(truthful_payoff) << " / 120\n"
       << "  best response        " << scaled(best_payoff) << " / 120 at cuts " << cuts(optimum)
       << (envious_at_optimum ? " (envious optimum)" : " (optimum not envious)") << '\n';
    if (witness_found)
      os << "  envious manipulation " << scaled(witness_payoff) << " / 120 at cuts " << cuts(witness) << '\n';
    else
      os << "  no profitable envious manipulation\n";
  }
  os << (pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace cakecut
