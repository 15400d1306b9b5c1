#pragma once

// Division procedures as query-driven state machines. A Protocol never sees
// valuations: it issues one Query at a time to one agent and advances on the
// Action it receives, exactly like a mediator that only observes reports.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cakecut/core.hpp"

namespace cakecut {

enum class ProcedureKind {
  AsymmetricCutChoose,  // ACC
  SymmetricCutChoose,   // SCC
  DubinsSpanier,        // DS
  LastDiminisher,       // LD
  EvenPaz,              // EP
  SelfridgeConway,      // SC
};

struct Procedure {
  ProcedureKind kind = ProcedureKind::AsymmetricCutChoose;
  int agents = 2;

  /// Parses ids such as "2ACC", "3ds", "4EP". Throws Error on unknown ids or
  /// unsupported arities (ACC/SCC need 2 agents, SC needs 3).
  static Procedure parse(std::string_view id);
  /// Canonical id, e.g. "3DS".
  [[nodiscard]] std::string id() const;
  /// Name shown to human subjects, e.g. "Leftmost Leaves".
  [[nodiscard]] std::string display_name() const;
  /// Upper bound on the number of cut rounds agent 0 can be asked for.
  [[nodiscard]] int subject_stages() const;

  friend bool operator==(const Procedure&, const Procedure&) = default;
};

const std::vector<Procedure>& lab_procedures();

enum class QueryKind {
  Cut,       // one boundary in [range.start, range.end]
  CutPair,   // two ordered boundaries in the range
  Choose,    // index into options
  Diminish,  // pass, or a boundary in [range.start, standing_cut)
  Trim,      // choice = piece to trim, cuts[0] = boundary inside it; trimmings lie left of it
};

std::string_view to_string(QueryKind kind);
QueryKind query_kind_from_string(std::string_view s);

/// The share a truthful answer claims: the boundary where the value measured
/// from range.start reaches ceil(shares * base / parts), base being the
/// agent's total value or, when of_range is set, its value of the range.
/// CutPair queries claim `shares` and `2 * shares`.
struct Claim {
  int shares = 1;
  int parts = 2;
  bool of_range = false;
};

struct Query {
  QueryKind kind = QueryKind::Cut;
  int agent = 0;
  Interval range;
  Pixel standing_cut = 0;
  std::vector<Piece> options;
  Claim claim;
  Interval remaining;        // the (sub)cake currently being divided
  std::vector<int> active;   // agents still dividing it
};

struct Action {
  std::vector<Pixel> cuts;
  std::optional<int> choice;

  static Action cut(Pixel x) { return {{x}, std::nullopt}; }
  static Action cut_pair(Pixel a, Pixel b) { return {{a, b}, std::nullopt}; }
  static Action choose(int option) { return {{}, option}; }
  static Action pass() { return {}; }
  static Action trim(int piece, Pixel at) { return {{at}, piece}; }

  [[nodiscard]] bool is_pass() const { return cuts.empty() && !choice; }
  friend bool operator==(const Action&, const Action&) = default;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class Protocol {
 public:
  Protocol(Procedure procedure, Pixel width);

  [[nodiscard]] const Procedure& procedure() const { return procedure_; }
  [[nodiscard]] Pixel width() const { return width_; }
  [[nodiscard]] bool done() const { return !pending_.has_value(); }
  /// Throws ProtocolError once done.
  [[nodiscard]] const Query& pending() const;
  /// Throws ProtocolError when the action does not answer the pending query.
  void apply(const Action& action);
  /// Final once done(); partial before.
  [[nodiscard]] const Allocation& allocation() const { return allocation_; }
  /// Encodes everything that influences the rest of the run.
  [[nodiscard]] std::string state_key() const;

 private:
  struct Subproblem {
    Interval cake;
    std::vector<int> agents;
  };

  void prepare();
  void validate(const Query& q, const Action& a) const;
  void give(int agent, Interval iv);
  void apply_staged(const Action& a);
  void resolve_stage();
  void apply_selfridge_conway(const Action& a);
  [[nodiscard]] Claim stage_claim(const Subproblem& sp) const;

  Procedure procedure_;
  Pixel width_;
  Allocation allocation_;
  std::optional<Query> pending_;

  int phase_ = 0;
  std::vector<Subproblem> stack_;  // back() is being divided
  std::vector<Pixel> stage_cuts_;  // aligned with stack_.back().agents
  std::size_t cursor_ = 0;
  Pixel standing_ = 0;
  int holder_ = -1;

  // Selfridge-Conway bookkeeping
  std::vector<Interval> main_;     // I_1..I_3 with the trimmed one replaced in place
  int trimmed_ = -1;
  Interval trimmings_;
  int trimmed_holder_ = -1;        // agent that received the trimmed piece
  std::vector<int> main_left_;     // indices of main pieces not yet taken
  std::vector<Interval> parts_;    // trimming parts not yet taken
};

// --- agents -----------------------------------------------------------------

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action respond(const Query& query) = 0;
};
using PolicyPtr = std::shared_ptr<Policy>;

/// Answer of an agent that reports its valuation truthfully.
Action truthful_action(const Valuation& v, const Query& query);
PolicyPtr truthful_policy(Valuation v);

/// Plays `script` for the queries it enumerates (Cut and CutPair) in order and
/// falls back to truthful answers for everything else or once exhausted.
PolicyPtr scripted_policy(Valuation v, std::vector<Action> script);

// --- running ----------------------------------------------------------------

struct TraceStep {
  Query query;
  Action action;
  int actor = 0;
  std::int64_t t_ms = 0;
};

struct RoundTrace {
  Procedure procedure;
  int subject = 0;
  std::vector<TraceStep> steps;
  Allocation allocation;
  std::vector<Points> points;  // v_i(A_i)

  [[nodiscard]] Points subject_points() const { return points.at(static_cast<std::size_t>(subject)); }
  [[nodiscard]] std::vector<Action> actions() const;
};

struct RunOptions {
  int subject = 0;
  /// Milliseconds recorded with each step; defaults to always 0 so traces
  /// are reproducible.
  std::function<std::int64_t()> clock;
};

struct RunResult {
  Allocation allocation;
  RoundTrace trace;
};

RunResult run(const Procedure& procedure, const Profile& profile, std::span<const PolicyPtr> policies,
              const RunOptions& options = {});

/// All agents truthful.
RunResult run_truthful(const Procedure& procedure, const Profile& profile, int subject = 0);

/// Selfridge-Conway with agent 0's two cuts fixed and everybody else
/// answering through `policies` (agent 0's entry answers the later queries).
RunResult run_3sc(Pixel c1, Pixel c2, const Profile& profile, std::span<const PolicyPtr> policies);

/// Feeds recorded actions back through the state machine.
Allocation replay(const Procedure& procedure, Pixel width, std::span<const Action> actions);

}  // namespace cakecut
