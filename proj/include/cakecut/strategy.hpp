#pragma once

// Exhaustive best-response search for one strategic agent against truthful
// automata, and the manipulation-gap checks built on it.

#include <string>
#include <vector>

#include "cakecut/core.hpp"
#include "cakecut/procedures.hpp"

namespace cakecut {

/// What a strategic agent may deviate on: its Cut/CutPair answers. Every
/// other query it receives is answered truthfully.
struct StrategySpace {
  Procedure procedure;
  int role = 0;
  /// Number of cut rounds searched exhaustively; later ones are answered
  /// truthfully. Procedures with at most `kFullSearchStages` cut rounds are
  /// searched over every round.
  int searched_stages = 1;

  static constexpr int kFullSearchStages = 3;
  static StrategySpace for_procedure(const Procedure& procedure, int role = 0);
};

struct BestResponse {
  std::vector<Action> actions;  // the deviation, in query order
  Points payoff = 0;
  Points truthful_payoff = 0;
  Points gain = 0;
  Points total = 0;  // the strategic agent's value of the whole cake
  bool envious_at_optimum = false;
  Allocation allocation;
};

BestResponse best_response(const Procedure& procedure, const Profile& profile, int role = 0);
BestResponse best_response(const StrategySpace& space, const Profile& profile);

/// (payoff - truthful_payoff) / total of the best response.
double epsilon_gap(const Procedure& procedure, const Profile& profile, int role = 0);

/// Every first-round deviation with truthful continuation, in lexicographic
/// order, with the resulting allocation.
struct Outcome {
  Action action;
  Allocation allocation;
  Points payoff = 0;
};
std::vector<Outcome> first_round_outcomes(const Procedure& procedure, const Profile& profile, int role = 0);

struct GapCheck {
  std::string procedure;
  double gap = 0;
  double threshold = 0;
  Points payoff = 0;
  Points truthful_payoff = 0;
  Points total = 0;
  bool pass = false;
};

struct LemmaReport {
  int lemma = 0;
  bool pass = false;
  std::vector<GapCheck> gaps;  // tightness check, one per procedure

  // envy check
  Points truthful_payoff = 0;
  Points best_payoff = 0;
  Points total = 0;
  bool envious_at_optimum = false;
  std::vector<Action> optimum;
  bool witness_found = false;
  std::vector<Action> witness;  // highest-paying profitable envious deviation
  Points witness_payoff = 0;

  [[nodiscard]] std::string to_text() const;
};

/// Slack allowed for pixel-level discretization of the tightness instances.
inline constexpr double kTightnessSlack = 0.02;

/// 3: manipulation gap on each lab procedure's tightness instance is at least
///    (n-1)/n - kTightnessSlack.
/// 4: on the envy instance some deviation beats truth-telling and leaves the
///    deviator envious.
LemmaReport verify_lemma(int which);
GapCheck check_tightness(const Procedure& procedure, const Profile& profile);
LemmaReport check_envy_manipulation(const Profile& profile);

}  // namespace cakecut
