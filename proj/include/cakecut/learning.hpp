#pragma once

// Rational learning in repeated two-agent cut-and-choose: the strategic cutter
// tracks bounds on the opponent's half-point and plans cuts by dynamic
// programming over those bounds.

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "cakecut/core.hpp"
#include "cakecut/procedures.hpp"

namespace cakecut::learning {

/// Exact non-negative fraction; comparisons never round.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  [[nodiscard]] double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 l = static_cast<__int128>(a.num) * b.den;
    const __int128 r = static_cast<__int128>(b.num) * a.den;
    return l <=> r;
  }
  friend bool operator==(const Rational& a, const Rational& b) { return (a <=> b) == 0; }
};

/// The opponent's half-point h is known to lie in (s, t].
struct KnowledgeState {
  Pixel s = 0;
  Pixel t = kLabWidth;
  friend bool operator==(const KnowledgeState&, const KnowledgeState&) = default;
};

/// Which piece the opponent ended up with. In cut-middle the procedure picks
/// for the opponent; receiving the left piece there means RightTaken.
enum class Observation { LeftTaken, RightTaken };

Observation observation_from_received(bool received_left);

class InconsistentObservation : public Error {
 public:
  using Error::Error;
};

/// Minimal boundary h with v(0, h) >= ceil(total / 2).
Pixel half_point(const Valuation& v);

/// RightTaken raises s to the cut, LeftTaken lowers t to it. Throws
/// InconsistentObservation when the bounds would cross.
KnowledgeState update(KnowledgeState k, Pixel cut, Observation observed);

struct Dominance {
  bool dominated = false;
  Pixel by = 0;
  friend bool operator==(const Dominance&, const Dominance&) = default;
};

/// Cuts left of s are dominated by s, cuts right of t by t.
Dominance classify(KnowledgeState k, Pixel cut);

struct RoundObservation {
  Pixel cut = 0;
  Observation observed = Observation::RightTaken;
};

struct RationalityAudit {
  int judged = 0;        // rounds 2..T
  int undominated = 0;
  double undominated_fraction = 1.0;
  bool fully_rational = true;
  bool inconsistent = false;  // the opponent contradicted earlier choices
  std::vector<Dominance> per_round;
};

RationalityAudit rationality_audit(std::span<const RoundObservation> rounds, Pixel width = kLabWidth);

/// Extracts the subject's cut and the observed side from 2ACC/2SCC traces.
std::vector<RoundObservation> observations(std::span<const RoundTrace> traces);

/// Guaranteed payoff when h is known: cut just left of h or at h.
Points u_opt(const Valuation& v, Pixel h);

/// Expected payoff of cutting at x when h is uniform over the integers in (s, t].
Rational u_mean(const Valuation& v, Pixel x, KnowledgeState k);

struct Plan {
  Pixel cut = 0;
  Rational expected_total;  // over the remaining rounds, this one included
};

/// Backward induction over (s, t, rounds_left) with a uniform prior on h.
/// Values are kept as integers scaled by (t - s), so every comparison is
/// exact. Tables for every (s, t) are filled one horizon at a time, so a
/// planner answers any state once built. Not safe to share across threads.
class Planner {
 public:
  explicit Planner(Valuation v);

  Plan plan(int rounds_left, KnowledgeState k);
  /// Best single-round cut (argmax u_mean), smallest on ties.
  [[nodiscard]] Plan myopic(KnowledgeState k) const;

 private:
  void extend(int rounds);
  std::size_t index(Pixel s, Pixel t, int rounds) const;

  Valuation v_;
  Pixel width_;
  int rounds_cached_ = 0;
  std::vector<std::int64_t> memo_;  // by rounds, then s, then t
  std::vector<Pixel> argmax_;
};

Plan plan(const Valuation& v, int rounds_left, KnowledgeState k);

enum class LearnerKind { Optimal, Myopic };

struct LearningRun {
  std::vector<RoundObservation> rounds;
  std::vector<Points> payoffs;
  std::vector<KnowledgeState> knowledge;  // before each round
};

/// Plays repeated cut-and-choose against a truthful opponent with half-point h.
LearningRun simulate_learning(const Valuation& v, Pixel opponent_half_point, int rounds, LearnerKind kind);

}  // namespace cakecut::learning
