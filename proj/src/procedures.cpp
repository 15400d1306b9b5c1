#include "cakecut/procedures.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>
#include <sstream>

namespace cakecut {
namespace {

struct KindInfo {
  ProcedureKind kind;
  std::string_view suffix;
  std::string_view display;
};

constexpr KindInfo kKinds[] = {
    {ProcedureKind::AsymmetricCutChoose, "ACC", "I Cut You Choose"},
    {ProcedureKind::SymmetricCutChoose, "SCC", "Cut Middle"},
    {ProcedureKind::DubinsSpanier, "DS", "Leftmost Leaves"},
    {ProcedureKind::LastDiminisher, "LD", "Last Challenger"},
    {ProcedureKind::EvenPaz, "EP", "Super Fast"},
    {ProcedureKind::SelfridgeConway, "SC", "Super Fair"},
};

const KindInfo& info(ProcedureKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k;
  throw Error("unknown procedure kind");
}

bool is_staged(ProcedureKind k) {
  return k == ProcedureKind::DubinsSpanier || k == ProcedureKind::LastDiminisher || k == ProcedureKind::EvenPaz;
}

Points ceil_div(Points a, Points b) { return (a + b - 1) / b; }

// Boundary where value from `from` reaches target, clamped to `limit`.
Pixel reach(const Valuation& v, Pixel from, Points target, Pixel limit) {
  if (v.total() - v.prefix(from) < target) return limit;
  return std::min(cut_point(v, from, target), limit);
}

}  // namespace

// --- Procedure --------------------------------------------------------------

Procedure Procedure::parse(std::string_view id) {
  std::size_t digits = 0;
  while (digits < id.size() && std::isdigit(static_cast<unsigned char>(id[digits]))) ++digits;
  if (digits == 0 || digits > 2) throw Error("procedure id '" + std::string(id) + "' lacks an agent count");
  const int n = std::stoi(std::string(id.substr(0, digits)));
  std::string suffix(id.substr(digits));
  std::transform(suffix.begin(), suffix.end(), suffix.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const auto& k : kKinds) {
    if (k.suffix != suffix) continue;
    const bool two_only = k.kind == ProcedureKind::AsymmetricCutChoose || k.kind == ProcedureKind::SymmetricCutChoose;
    if (two_only && n != 2) throw Error(std::string(k.suffix) + " is defined for 2 agents");
    if (k.kind == ProcedureKind::SelfridgeConway && n != 3) throw Error("SC is defined for 3 agents");
    if (n < 2 || n > 16) throw Error("unsupported agent count " + std::to_string(n));
    return Procedure{k.kind, n};
  }
  throw Error("unknown procedure '" + std::string(id) + "'");
}

std::string Procedure::id() const { return std::to_string(agents) + std::string(info(kind).suffix); }

std::string Procedure::display_name() const { return std::string(info(kind).display); }

int Procedure::subject_stages() const {
  switch (kind) {
    case ProcedureKind::DubinsSpanier:
    case ProcedureKind::LastDiminisher:
      return agents - 1;
    case ProcedureKind::EvenPaz: {
      int stages = 0;
      for (int m = agents; m > 1; m = (m + 1) / 2) ++stages;
      return stages;
    }
    default:
      return 1;
  }
}

const std::vector<Procedure>& lab_procedures() {
  static const std::vector<Procedure> kOrder = {
      Procedure::parse("2ACC"), Procedure::parse("2SCC"), Procedure::parse("3DS"), Procedure::parse("4DS"),
      Procedure::parse("3LD"),  Procedure::parse("4LD"),  Procedure::parse("4EP"), Procedure::parse("3SC")};
  return kOrder;
}

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Cut: return "cut";
    case QueryKind::CutPair: return "cut2";
    case QueryKind::Choose: return "choose";
    case QueryKind::Diminish: return "diminish";
    case QueryKind::Trim: return "trim";
  }
  return "?";
}

QueryKind query_kind_from_string(std::string_view s) {
  for (auto k : {QueryKind::Cut, QueryKind::CutPair, QueryKind::Choose, QueryKind::Diminish, QueryKind::Trim})
    if (to_string(k) == s) return k;
  throw Error("unknown query kind '" + std::string(s) + "'");
}

// --- Protocol ---------------------------------------------------------------

Protocol::Protocol(Procedure procedure, Pixel width) : procedure_(procedure), width_(width) {
  if (width_ < 2) throw Error("cake width must be at least 2");
  allocation_.pieces.resize(static_cast<std::size_t>(procedure_.agents));
  if (is_staged(procedure_.kind)) {
    std::vector<int> all(static_cast<std::size_t>(procedure_.agents));
    std::iota(all.begin(), all.end(), 0);
    stack_.push_back({{0, width_}, std::move(all)});
  }
  prepare();
}

const Query& Protocol::pending() const {
  if (!pending_) throw ProtocolError("procedure already finished");
  return *pending_;
}

void Protocol::give(int agent, Interval iv) {
  auto& piece = allocation_.pieces.at(static_cast<std::size_t>(agent));
  piece = piece.united(Piece({iv}));
}

Claim Protocol::stage_claim(const Subproblem& sp) const {
  if (procedure_.kind == ProcedureKind::EvenPaz)
    return {static_cast<int>(sp.agents.size()) / 2, procedure_.agents, false};
  return {1, procedure_.agents, false};
}

void Protocol::prepare() {
  pending_.reset();
  const Interval whole{0, width_};
  auto make = [&](QueryKind kind, int agent, Interval range, Interval remaining, std::vector<int> active) {
    Query q;
    q.kind = kind;
    q.agent = agent;
    q.range = range;
    q.remaining = remaining;
    q.active = std::move(active);
    return q;
  };

  switch (procedure_.kind) {
    case ProcedureKind::AsymmetricCutChoose:
      if (phase_ == 0) {
        pending_ = make(QueryKind::Cut, 0, whole, whole, {0, 1});
        pending_->claim = {1, 2, false};
      } else if (phase_ == 1) {
        pending_ = make(QueryKind::Choose, 1, whole, whole, {0, 1});
        pending_->options = {Piece::of(0, standing_), Piece::of(standing_, width_)};
      }
      return;
    case ProcedureKind::SymmetricCutChoose:
      if (phase_ < 2) {
        pending_ = make(QueryKind::Cut, phase_, whole, whole, {0, 1});
        pending_->claim = {1, 2, false};
      }
      return;
    case ProcedureKind::SelfridgeConway:
      break;
    default: {
      while (!stack_.empty() && stack_.back().agents.size() == 1) {
        give(stack_.back().agents.front(), stack_.back().cake);
        stack_.pop_back();
      }
      if (stack_.empty()) return;
      const auto& sp = stack_.back();
      const int agent = sp.agents[cursor_];
      const Interval range{sp.cake.start, sp.cake.end};
      if (procedure_.kind == ProcedureKind::LastDiminisher && cursor_ > 0) {
        pending_ = make(QueryKind::Diminish, agent, Interval{sp.cake.start, standing_}, sp.cake, sp.agents);
        pending_->standing_cut = standing_;
      } else {
        pending_ = make(QueryKind::Cut, agent, range, sp.cake, sp.agents);
      }
      pending_->claim = stage_claim(sp);
      return;
    }
  }

  // Selfridge-Conway
  const int i = trimmed_holder_;
  const int j = i == 1 ? 2 : 1;
  auto pieces_of = [](const std::vector<Interval>& ivs, const std::vector<int>& idx) {
    std::vector<Piece> out;
    for (int k : idx) out.push_back(Piece({ivs[static_cast<std::size_t>(k)]}));
    return out;
  };
  switch (phase_) {
    case 0:
      pending_ = make(QueryKind::CutPair, 0, whole, whole, {0, 1, 2});
      pending_->claim = {1, 3, false};
      break;
    case 1:
      pending_ = make(QueryKind::Trim, 1, whole, whole, {0, 1, 2});
      pending_->options = pieces_of(main_, {0, 1, 2});
      break;
    case 2:
      pending_ = make(QueryKind::Choose, 2, whole, whole, {0, 1, 2});
      pending_->options = pieces_of(main_, {0, 1, 2});
      break;
    case 3:
      pending_ = make(QueryKind::Choose, 1, whole, whole, {0, 1});
      pending_->options = pieces_of(main_, main_left_);
      break;
    case 4:
      pending_ = make(QueryKind::CutPair, j, trimmings_, trimmings_, {0, 1, 2});
      pending_->claim = {1, 3, true};
      break;
    case 5:
      pending_ = make(QueryKind::Choose, i, trimmings_, trimmings_, {0, 1, 2});
      pending_->options = pieces_of(parts_, {0, 1, 2});
      break;
    case 6:
      pending_ = make(QueryKind::Choose, 0, trimmings_, trimmings_, {0, j});
      pending_->options = pieces_of(parts_, {0, 1});
      break;
    default:
      break;
  }
}

void Protocol::validate(const Query& q, const Action& a) const {
  auto fail = [&](const std::string& why) {
    throw ProtocolError("invalid " + std::string(to_string(q.kind)) + " answer from agent " +
                        std::to_string(q.agent) + ": " + why);
  };
  auto in_range = [&](Pixel x) { return x >= q.range.start && x <= q.range.end; };
  const std::string bounds = "[" + std::to_string(q.range.start) + "," + std::to_string(q.range.end) + "]";
  switch (q.kind) {
    case QueryKind::Cut:
      if (a.choice || a.cuts.size() != 1) fail("expected one cut");
      if (!in_range(a.cuts[0])) fail("cut " + std::to_string(a.cuts[0]) + " outside " + bounds);
      break;
    case QueryKind::CutPair:
      if (a.choice || a.cuts.size() != 2) fail("expected two cuts");
      if (!in_range(a.cuts[0]) || !in_range(a.cuts[1])) fail("cuts outside " + bounds);
      if (a.cuts[0] > a.cuts[1]) fail("cuts must be ordered");
      break;
    case QueryKind::Choose:
      if (!a.cuts.empty() || !a.choice) fail("expected a choice");
      if (*a.choice < 0 || *a.choice >= static_cast<int>(q.options.size())) fail("choice out of range");
      break;
    case QueryKind::Diminish:
      if (a.is_pass()) break;
      if (a.choice || a.cuts.size() != 1) fail("expected a pass or one cut");
      if (a.cuts[0] < q.range.start || a.cuts[0] >= q.standing_cut)
        fail("diminished cut must lie in [" + std::to_string(q.range.start) + "," +
             std::to_string(q.standing_cut) + ")");
      break;
    case QueryKind::Trim: {
      if (!a.choice || a.cuts.size() != 1) fail("expected a piece and a trim boundary");
      if (*a.choice < 0 || *a.choice >= 3) fail("piece out of range");
      const auto& iv = main_[static_cast<std::size_t>(*a.choice)];
      if (a.cuts[0] < iv.start || a.cuts[0] > iv.end) fail("trim boundary outside the piece");
      break;
    }
  }
}

void Protocol::apply(const Action& action) {
  const Query& q = pending();
  validate(q, action);
  switch (procedure_.kind) {
    case ProcedureKind::AsymmetricCutChoose:
      if (phase_ == 0) {
        standing_ = action.cuts[0];
      } else {
        const Interval left{0, standing_}, right{standing_, width_};
        const bool took_left = *action.choice == 0;
        give(1, took_left ? left : right);
        give(0, took_left ? right : left);
      }
      ++phase_;
      break;
    case ProcedureKind::SymmetricCutChoose:
      stage_cuts_.push_back(action.cuts[0]);
      if (++phase_ == 2) {
        const Pixel x0 = stage_cuts_[0], x1 = stage_cuts_[1];
        const Pixel mid = (x0 + x1) / 2;
        // Agent 0 is the lower cutter only when strictly lower.
        const int lower = x0 < x1 ? 0 : 1;
        give(lower, {0, mid});
        give(1 - lower, {mid, width_});
      }
      break;
    case ProcedureKind::SelfridgeConway:
      apply_selfridge_conway(action);
      break;
    default:
      apply_staged(action);
      break;
  }
  prepare();
}

void Protocol::apply_staged(const Action& a) {
  auto& sp = stack_.back();
  if (procedure_.kind == ProcedureKind::LastDiminisher) {
    if (cursor_ == 0 || !a.is_pass()) {
      standing_ = a.cuts[0];
      holder_ = sp.agents[cursor_];
    }
  } else {
    stage_cuts_.push_back(a.cuts[0]);
  }
  if (++cursor_ == sp.agents.size()) resolve_stage();
}

void Protocol::resolve_stage() {
  auto sp = stack_.back();
  switch (procedure_.kind) {
    case ProcedureKind::DubinsSpanier: {
      // agents are kept in ascending index order, so the first minimum is the lowest index
      const auto k = static_cast<std::size_t>(
          std::distance(stage_cuts_.begin(), std::min_element(stage_cuts_.begin(), stage_cuts_.end())));
      give(sp.agents[k], {sp.cake.start, stage_cuts_[k]});
      stack_.back().cake.start = stage_cuts_[k];
      stack_.back().agents.erase(stack_.back().agents.begin() + static_cast<std::ptrdiff_t>(k));
      break;
    }
    case ProcedureKind::LastDiminisher:
      give(holder_, {sp.cake.start, standing_});
      stack_.back().cake.start = standing_;
      std::erase(stack_.back().agents, holder_);
      break;
    case ProcedureKind::EvenPaz: {
      std::vector<std::size_t> order(sp.agents.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return stage_cuts_[a] < stage_cuts_[b]; });
      const std::size_t k = sp.agents.size() / 2;
      const Pixel median = stage_cuts_[order[k - 1]];
      Subproblem left{{sp.cake.start, median}, {}}, right{{median, sp.cake.end}, {}};
      for (std::size_t r = 0; r < order.size(); ++r) (r < k ? left : right).agents.push_back(sp.agents[order[r]]);
      std::sort(left.agents.begin(), left.agents.end());
      std::sort(right.agents.begin(), right.agents.end());
      stack_.pop_back();
      stack_.push_back(std::move(right));
      stack_.push_back(std::move(left));
      break;
    }
    default:
      break;
  }
  stage_cuts_.clear();
  cursor_ = 0;
  holder_ = -1;
}

void Protocol::apply_selfridge_conway(const Action& a) {
  auto finish_main = [&] { phase_ = trimmings_.empty() ? 7 : 4; };
  switch (phase_) {
    case 0:
      main_ = {{0, a.cuts[0]}, {a.cuts[0], a.cuts[1]}, {a.cuts[1], width_}};
      phase_ = 1;
      break;
    case 1: {
      trimmed_ = *a.choice;
      auto& piece = main_[static_cast<std::size_t>(trimmed_)];
      trimmings_ = {piece.start, a.cuts[0]};
      piece.start = a.cuts[0];
      phase_ = 2;
      break;
    }
    case 2: {
      const int c = *a.choice;
      give(2, main_[static_cast<std::size_t>(c)]);
      main_left_.clear();
      for (int k = 0; k < 3; ++k)
        if (k != c) main_left_.push_back(k);
      if (c == trimmed_) {
        trimmed_holder_ = 2;
        phase_ = 3;
      } else {
        trimmed_holder_ = 1;
        give(1, main_[static_cast<std::size_t>(trimmed_)]);
        std::erase(main_left_, trimmed_);
        give(0, main_[static_cast<std::size_t>(main_left_.front())]);
        main_left_.clear();
        finish_main();
      }
      break;
    }
    case 3: {
      const auto c = static_cast<std::size_t>(*a.choice);
      give(1, main_[static_cast<std::size_t>(main_left_[c])]);
      give(0, main_[static_cast<std::size_t>(main_left_[1 - c])]);
      main_left_.clear();
      finish_main();
      break;
    }
    case 4:
      parts_ = {{trimmings_.start, a.cuts[0]}, {a.cuts[0], a.cuts[1]}, {a.cuts[1], trimmings_.end}};
      phase_ = 5;
      break;
    case 5:
      give(trimmed_holder_, parts_[static_cast<std::size_t>(*a.choice)]);
      parts_.erase(parts_.begin() + *a.choice);
      phase_ = 6;
      break;
    case 6: {
      give(0, parts_[static_cast<std::size_t>(*a.choice)]);
      parts_.erase(parts_.begin() + *a.choice);
      give(trimmed_holder_ == 1 ? 2 : 1, parts_.front());
      parts_.clear();
      phase_ = 7;
      break;
    }
    default:
      break;
  }
}

std::string Protocol::state_key() const {
  std::ostringstream os;
  auto ivs = [&](const std::vector<Interval>& v) {
    for (const auto& iv : v) os << iv.start << '-' << iv.end << ',';
    os << ';';
  };
  os << phase_ << '|' << cursor_ << '|' << standing_ << '|' << holder_ << '|';
  for (const auto& p : allocation_.pieces) ivs(p.intervals());
  os << '|';
  for (const auto& sp : stack_) {
    os << sp.cake.start << '-' << sp.cake.end << ':';
    for (int a : sp.agents) os << a << ',';
    os << ';';
  }
  os << '|';
  for (Pixel c : stage_cuts_) os << c << ',';
  os << '|';
  ivs(main_);
  os << trimmed_ << '|' << trimmings_.start << '-' << trimmings_.end << '|' << trimmed_holder_ << '|';
  for (int k : main_left_) os << k << ',';
  os << '|';
  ivs(parts_);
  return os.str();
}

// --- policies ---------------------------------------------------------------

Action truthful_action(const Valuation& v, const Query& q) {
  const Points base = q.claim.of_range ? v.value(q.range) : v.total();
  auto target = [&](int multiple) {
    return ceil_div(static_cast<Points>(multiple) * q.claim.shares * base, q.claim.parts);
  };
  switch (q.kind) {
    case QueryKind::Cut:
      return Action::cut(reach(v, q.range.start, target(1), q.range.end));
    case QueryKind::CutPair:
      return Action::cut_pair(reach(v, q.range.start, target(1), q.range.end),
                              reach(v, q.range.start, target(2), q.range.end));
    case QueryKind::Diminish: {
      const Pixel fair = reach(v, q.range.start, target(1), q.standing_cut);
      return fair < q.standing_cut ? Action::cut(fair) : Action::pass();
    }
    case QueryKind::Choose: {
      int best = 0;
      Points best_value = -1;
      for (std::size_t k = 0; k < q.options.size(); ++k) {
        const Points val = value_of(v, q.options[k]);
        if (val > best_value) {
          best_value = val;
          best = static_cast<int>(k);
        }
      }
      return Action::choose(best);
    }
    case QueryKind::Trim: {
      std::vector<Points> vals;
      for (const auto& p : q.options) vals.push_back(value_of(v, p));
      const auto best = static_cast<std::size_t>(std::distance(vals.begin(), std::max_element(vals.begin(), vals.end())));
      Points second = 0;
      for (std::size_t k = 0; k < vals.size(); ++k)
        if (k != best) second = std::max(second, vals[k]);
      // options keep their extents only when non-empty; an empty best piece
      // means every piece is worthless and there is nothing to trim.
      const auto& ivs = q.options[best].intervals();
      if (ivs.empty()) return Action::trim(static_cast<int>(best), 0);
      const Interval iv{ivs.front().start, ivs.back().end};
      if (vals[best] == second) return Action::trim(static_cast<int>(best), iv.start);
      return Action::trim(static_cast<int>(best), trim_point(v, iv.start, iv.end, second));
    }
  }
  throw ProtocolError("unhandled query");
}

namespace {

class TruthfulPolicy final : public Policy {
 public:
  explicit TruthfulPolicy(Valuation v) : v_(std::move(v)) {}
  Action respond(const Query& q) override { return truthful_action(v_, q); }

 private:
  Valuation v_;
};

class ScriptedPolicy final : public Policy {
 public:
  ScriptedPolicy(Valuation v, std::vector<Action> script) : v_(std::move(v)), script_(script.begin(), script.end()) {}
  Action respond(const Query& q) override {
    if ((q.kind == QueryKind::Cut || q.kind == QueryKind::CutPair) && !script_.empty()) {
      Action a = std::move(script_.front());
      script_.pop_front();
      return a;
    }
    return truthful_action(v_, q);
  }

 private:
  Valuation v_;
  std::deque<Action> script_;
};

}  // namespace

PolicyPtr truthful_policy(Valuation v) { return std::make_shared<TruthfulPolicy>(std::move(v)); }

PolicyPtr scripted_policy(Valuation v, std::vector<Action> script) {
  return std::make_shared<ScriptedPolicy>(std::move(v), std::move(script));
}

// --- running ----------------------------------------------------------------

std::vector<Action> RoundTrace::actions() const {
  std::vector<Action> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.action);
  return out;
}

RunResult run(const Procedure& procedure, const Profile& profile, std::span<const PolicyPtr> policies,
              const RunOptions& options) {
  const auto n = static_cast<std::size_t>(procedure.agents);
  if (profile.size() != n)
    throw Error(procedure.id() + " needs " + std::to_string(n) + " valuations, profile has " +
                std::to_string(profile.size()));
  if (policies.size() != n) throw Error("one policy per agent required");
  for (const auto& v : profile.agents)
    if (v.width() != profile.width) throw Error("valuation width differs from cake width");

  Protocol protocol(procedure, profile.width);
  RunResult result;
  result.trace.procedure = procedure;
  result.trace.subject = options.subject;
  while (!protocol.done()) {
    const Query& q = protocol.pending();
    Action a = policies[static_cast<std::size_t>(q.agent)]->respond(q);
    const std::int64_t t = options.clock ? options.clock() : 0;
    TraceStep step{q, a, q.agent, t};
    protocol.apply(a);
    result.trace.steps.push_back(std::move(step));
  }
  result.allocation = protocol.allocation();
  result.trace.allocation = result.allocation;
  for (std::size_t i = 0; i < n; ++i) result.trace.points.push_back(value_of(profile[i], result.allocation.pieces[i]));
  return result;
}

RunResult run_truthful(const Procedure& procedure, const Profile& profile, int subject) {
  std::vector<PolicyPtr> policies;
  for (const auto& v : profile.agents) policies.push_back(truthful_policy(v));
  RunOptions opts;
  opts.subject = subject;
  return run(procedure, profile, policies, opts);
}

RunResult run_3sc(Pixel c1, Pixel c2, const Profile& profile, std::span<const PolicyPtr> policies) {
  class FixedCuts final : public Policy {
   public:
    FixedCuts(Pixel a, Pixel b, PolicyPtr rest) : cuts_(Action::cut_pair(a, b)), rest_(std::move(rest)) {}
    Action respond(const Query& q) override {
      if (!used_ && q.kind == QueryKind::CutPair) {
        used_ = true;
        return cuts_;
      }
      return rest_->respond(q);
    }

   private:
    Action cuts_;
    PolicyPtr rest_;
    bool used_ = false;
  };
  if (policies.empty()) throw Error("3SC needs three policies");
  std::vector<PolicyPtr> all(policies.begin(), policies.end());
  all[0] = std::make_shared<FixedCuts>(c1, c2, all[0]);
  return run(Procedure::parse("3SC"), profile, all);
}

Allocation replay(const Procedure& procedure, Pixel width, std::span<const Action> actions) {
  Protocol protocol(procedure, width);
  for (const auto& a : actions) {
    if (protocol.done()) throw ProtocolError("trace has more actions than the procedure consumes");
    protocol.apply(a);
  }
  if (!protocol.done()) throw ProtocolError("trace ends before the procedure finishes");
  return protocol.allocation();
}

}  // namespace cakecut
