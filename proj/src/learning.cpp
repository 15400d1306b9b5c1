#include "cakecut/learning.hpp"

#include <algorithm>

namespace cakecut::learning {

Observation observation_from_received(bool received_left) {
  return received_left ? Observation::RightTaken : Observation::LeftTaken;
}

Pixel half_point(const Valuation& v) {
  if (v.total() <= 0) throw Error("half point of a valuation with no value");
  return cut_point(v, 0, (v.total() + 1) / 2);
}

KnowledgeState update(KnowledgeState k, Pixel cut, Observation observed) {
  if (observed == Observation::RightTaken)
    k.s = std::max(k.s, cut);
  else
    k.t = std::min(k.t, cut);
  if (k.s >= k.t)
    throw InconsistentObservation("observation at cut " + std::to_string(cut) + " leaves no half point in (" +
                                  std::to_string(k.s) + ", " + std::to_string(k.t) + "]");
  return k;
}

Dominance classify(KnowledgeState k, Pixel cut) {
  if (cut < k.s) return {true, k.s};
  if (cut > k.t) return {true, k.t};
  return {};
}

RationalityAudit rationality_audit(std::span<const RoundObservation> rounds, Pixel width) {
  RationalityAudit out;
  KnowledgeState k{0, width};
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const auto& r = rounds[i];
    if (i > 0) {
      const auto d = classify(k, r.cut);
      out.per_round.push_back(d);
      ++out.judged;
      if (!d.dominated) ++out.undominated;
    }
    try {
      k = update(k, r.cut, r.observed);
    } catch (const InconsistentObservation&) {
      out.inconsistent = true;
    }
  }
  if (out.judged > 0) out.undominated_fraction = static_cast<double>(out.undominated) / out.judged;
  out.fully_rational = out.undominated == out.judged;
  return out;
}

std::vector<RoundObservation> observations(std::span<const RoundTrace> traces) {
  std::vector<RoundObservation> out;
  for (const auto& tr : traces) {
    const auto kind = tr.procedure.kind;
    if (kind != ProcedureKind::AsymmetricCutChoose && kind != ProcedureKind::SymmetricCutChoose)
      throw Error("learning observations need a two-agent cut-and-choose trace, got " + tr.procedure.id());
    std::optional<Pixel> own, other;
    std::optional<int> choice;
    for (const auto& st : tr.steps) {
      if (st.query.kind == QueryKind::Cut) (st.actor == tr.subject ? own : other) = st.action.cuts.at(0);
      if (st.query.kind == QueryKind::Choose && st.actor != tr.subject) choice = st.action.choice;
    }
    if (!own) continue;  // the subject did not cut this round
    if (kind == ProcedureKind::AsymmetricCutChoose) {
      if (!choice) continue;
      out.push_back({*own, *choice == 0 ? Observation::LeftTaken : Observation::RightTaken});
    } else {
      if (!other) continue;
      const bool received_left = tr.subject == 0 ? *own < *other : *own <= *other;
      out.push_back({*own, observation_from_received(received_left)});
    }
  }
  return out;
}

Points u_opt(const Valuation& v, Pixel h) {
  if (h < 1 || h > v.width()) throw Error("half point out of range: " + std::to_string(h));
  return std::max(v.value(0, h - 1), v.value(h, v.width()));
}

Rational u_mean(const Valuation& v, Pixel x, KnowledgeState k) {
  if (k.s >= k.t) throw Error("empty knowledge state");
  if (x < k.s || x > k.t) throw Error("cut outside the knowledge bounds");
  const Pixel c = v.width();
  return {(x - k.s) * v.value(x, c) + (k.t - x) * v.value(0, x), k.t - k.s};
}

Planner::Planner(Valuation v) : v_(std::move(v)), width_(v_.width()) {}

std::size_t Planner::index(Pixel s, Pixel t, int rounds) const {
  const auto w = static_cast<std::size_t>(width_) + 1;
  return (static_cast<std::size_t>(rounds - 1) * w + static_cast<std::size_t>(s)) * w + static_cast<std::size_t>(t);
}

void Planner::extend(int rounds) {
  const auto w = static_cast<std::size_t>(width_) + 1;
  memo_.resize(static_cast<std::size_t>(rounds) * w * w, 0);
  argmax_.resize(memo_.size(), 0);
  std::vector<Points> pre(w), suf(w);
  for (Pixel x = 0; x <= width_; ++x) {
    pre[static_cast<std::size_t>(x)] = v_.prefix(x);
    suf[static_cast<std::size_t>(x)] = v_.total() - v_.prefix(x);
  }
  for (int r = rounds_cached_ + 1; r <= rounds; ++r) {
    // Entries are (t - s) times the optimal expected total over r rounds.
    const std::int64_t* prev = r > 1 ? &memo_[index(0, 0, r - 1)] : nullptr;
    for (Pixel s = 0; s < width_; ++s) {
      for (Pixel t = s + 1; t <= width_; ++t) {
        std::int64_t best = -1;
        Pixel arg = s;
        for (Pixel x = s; x <= t; ++x) {
          // h <= x: left taken, the cutter keeps [x, c) and learns h in (s, x].
          // h > x: right taken, the cutter keeps [0, x) and learns h in (x, t].
          const auto xi = static_cast<std::size_t>(x);
          std::int64_t val = (x - s) * suf[xi] + (t - x) * pre[xi];
          if (prev) val += prev[static_cast<std::size_t>(s) * w + xi] + prev[xi * w + static_cast<std::size_t>(t)];
          if (val > best) {
            best = val;
            arg = x;
          }
        }
        memo_[index(s, t, r)] = best;
        argmax_[index(s, t, r)] = arg;
      }
    }
  }
  rounds_cached_ = rounds;
}

Plan Planner::plan(int rounds_left, KnowledgeState k) {
  if (rounds_left < 1) throw Error("plan needs at least one round left");
  if (k.s < 0 || k.s >= k.t || k.t > width_) throw Error("invalid knowledge state");
  if (rounds_left > rounds_cached_) extend(rounds_left);
  const auto i = index(k.s, k.t, rounds_left);
  return {argmax_[i], {memo_[i], k.t - k.s}};
}

Plan Planner::myopic(KnowledgeState k) const {
  Plan best{k.s, u_mean(v_, k.s, k)};
  for (Pixel x = k.s + 1; x <= k.t; ++x)
    if (auto u = u_mean(v_, x, k); u > best.expected_total) best = {x, u};
  return best;
}

Plan plan(const Valuation& v, int rounds_left, KnowledgeState k) { return Planner(v).plan(rounds_left, k); }

LearningRun simulate_learning(const Valuation& v, Pixel opponent_half_point, int rounds, LearnerKind kind) {
  const Pixel c = v.width();
  if (opponent_half_point < 1 || opponent_half_point > c) throw Error("opponent half point out of range");
  Planner planner(v);
  LearningRun run;
  KnowledgeState k{0, c};
  for (int r = 0; r < rounds; ++r) {
    run.knowledge.push_back(k);
    const Pixel x = kind == LearnerKind::Optimal ? planner.plan(rounds - r, k).cut : planner.myopic(k).cut;
    const bool left_taken = opponent_half_point <= x;
    const auto obs = left_taken ? Observation::LeftTaken : Observation::RightTaken;
    run.rounds.push_back({x, obs});
    run.payoffs.push_back(left_taken ? v.value(x, c) : v.value(0, x));
    k = update(k, x, obs);
  }
  return run;
}

}  // namespace cakecut::learning
