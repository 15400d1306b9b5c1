#pragma once

// The lab session: a fixed sequence of procedures, several rounds each,
// against truthful automata, with a reveal round, a per-procedure time budget
// and a payment draw. Rounds are persisted as JSONL and scored from there.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cakecut/core.hpp"
#include "cakecut/io.hpp"
#include "cakecut/procedures.hpp"

namespace cakecut::experiment {

struct SessionConfig {
  std::vector<Procedure> order = lab_procedures();
  int rounds = 7;
  int reveal_round = 6;
  std::int64_t time_limit_ms = 420'000;  // per procedure
  bool enforce_time_limit = false;
  /// Keyed by procedure id ("2ACC"); missing ids use the lab fixtures.
  std::map<std::string, Profile> profiles;
  std::uint64_t seed = 1;
  std::string subject = "subject";

  /// Throws Error on unknown procedures, bad round counts or profiles that
  /// do not fit their procedure.
  void validate() const;
  [[nodiscard]] Profile profile_for(const Procedure& procedure) const;
  [[nodiscard]] int total_rounds() const { return rounds * static_cast<int>(order.size()); }
};

io::Json to_json(const SessionConfig& config);
SessionConfig config_from_json(const io::Json& j);

struct AllocatedInterval {
  Pixel start = 0;
  Pixel end = 0;
  int agent = 0;
  friend bool operator==(const AllocatedInterval&, const AllocatedInterval&) = default;
};

/// Intervals of an allocation sorted by position.
std::vector<AllocatedInterval> summarize(const Allocation& allocation);

struct RoundResult {
  std::string procedure;
  int round = 0;
  Points points = 0;  // the subject's own piece
  /// Every agent's piece valued with the subject's valuation.
  std::vector<Points> subject_view_of_pieces;
  std::vector<AllocatedInterval> allocation;
  bool revealed = false;
  bool timed_out = false;
};

/// One persisted round.
struct TraceRecord {
  std::string session;
  std::string subject;
  int round = 0;
  bool revealed = false;
  bool timed_out = false;
  RoundTrace trace;  // steps are partial when timed out
  std::vector<Points> subject_view_of_pieces;

  [[nodiscard]] RoundResult result() const;
};

io::Json to_json(const TraceRecord& record);
/// Replays the recorded actions to rebuild the queries; throws Error if the
/// replayed allocation disagrees with the recorded one.
TraceRecord record_from_json(const io::Json& j, const Profile& profile);

/// Everything a trace file holds.
struct SessionLog {
  std::string session;
  SessionConfig config;
  std::vector<TraceRecord> records;
  std::optional<io::Json> questionnaire;
};

std::string header_line(const std::string& session, const SessionConfig& config);
std::string to_jsonl(const SessionLog& log);
SessionLog read_log(const std::filesystem::path& path);
SessionLog parse_log(const std::string& jsonl, const std::string& origin = "trace");
/// Every *.jsonl file in a directory, sorted by name.
std::vector<SessionLog> read_logs(const std::filesystem::path& dir);

enum class SubmitKind { NextQuery, RoundResult, ProcedureDone, SessionDone };
std::string_view to_string(SubmitKind kind);

struct SubmitOutcome {
  SubmitKind kind = SubmitKind::NextQuery;
  std::optional<Query> next;          // set for NextQuery
  std::vector<RoundResult> results;   // finished rounds; several after a timeout
};

class SessionError : public Error {
 public:
  using Error::Error;
};

class Session {
 public:
  using Clock = std::function<std::int64_t()>;  // milliseconds

  /// When trace_dir is set the header and every finished round are appended
  /// to <trace_dir>/<id>.jsonl.
  Session(std::string id, SessionConfig config, Clock clock = {},
          std::optional<std::filesystem::path> trace_dir = {});

  /// Rebuilds a session from its trace file. A round that was in progress is
  /// lost and starts over.
  static Session recover(const std::filesystem::path& trace_file, Clock clock = {});

  [[nodiscard]] const std::string& id() const { return id_; }
  [[nodiscard]] const SessionConfig& config() const { return config_; }
  [[nodiscard]] bool done() const { return proc_index_ >= config_.order.size(); }
  /// Throws SessionError once done.
  [[nodiscard]] const Procedure& procedure() const;
  [[nodiscard]] const Profile& profile() const;
  [[nodiscard]] std::size_t procedure_index() const { return proc_index_; }
  [[nodiscard]] int round() const { return round_; }
  [[nodiscard]] bool round_active() const { return protocol_.has_value(); }
  /// Opponent valuations are visible from the reveal round on.
  [[nodiscard]] bool revealed() const { return !done() && round_ >= config_.reveal_round; }
  /// The subject's pending query, or nothing between rounds.
  [[nodiscard]] const Query* pending() const;
  [[nodiscard]] std::int64_t remaining_ms() const;

  /// Starts the clock for the next round. Idempotent while a round runs.
  /// A round also starts on the first submit.
  void start_round();
  SubmitOutcome submit(const Action& action);

  [[nodiscard]] const std::vector<RoundResult>& results() const { return results_; }
  [[nodiscard]] const std::vector<TraceRecord>& records() const { return records_; }
  [[nodiscard]] std::vector<Points> round_points() const;
  [[nodiscard]] SessionLog log() const;

  /// Stored verbatim; no validation beyond being JSON.
  void set_questionnaire(io::Json answers);
  [[nodiscard]] const std::optional<io::Json>& questionnaire() const { return questionnaire_; }

 private:
  void run_automata();
  void finish_round(bool timed_out, SubmitOutcome& out);
  bool expire(SubmitOutcome& out);
  void append_line(const std::string& line) const;
  [[nodiscard]] std::int64_t now() const { return clock_(); }

  std::string id_;
  SessionConfig config_;
  Clock clock_;
  std::optional<std::filesystem::path> trace_file_;

  std::size_t proc_index_ = 0;
  int round_ = 1;
  Profile profile_;
  std::optional<Protocol> protocol_;
  std::vector<TraceStep> steps_;
  std::int64_t round_started_ = 0;
  std::int64_t elapsed_ms_ = 0;  // in finished rounds of the current procedure

  std::vector<RoundResult> results_;
  std::vector<TraceRecord> records_;
  std::optional<io::Json> questionnaire_;
};

// --- payment -----------------------------------------------------------------

inline constexpr std::int64_t kShowUpPence = 500;

struct Payment {
  std::size_t first = 0;   // indices of the drawn rounds
  std::size_t second = 0;
  Points first_points = 0;
  Points second_points = 0;
  std::int64_t pence = 0;

  [[nodiscard]] double pounds() const { return static_cast<double>(pence) / 100.0; }
};

/// Show-up fee plus the points of two distinct rounds drawn uniformly, one
/// pound per ten points.
Payment payment(std::span<const Points> round_points, std::mt19937_64& rng);
/// Draws with a generator seeded from the session's config. Throws
/// SessionError before the session is complete.
Payment payment(const Session& session);

// --- metrics -----------------------------------------------------------------

struct MetricTolerances {
  std::vector<Points> envy = {0, 5, 10};
  std::vector<Points> payoff = {5, 10, 15};
  Pixel cut_pixels = 5;
};

struct MetricRow {
  std::string procedure;
  std::string round;  // "1".."7" or "all"
  std::string metric;
  std::optional<double> tolerance;
  double value = 0;
};

struct MetricsReport {
  std::vector<MetricRow> rows;

  /// Throws Error when absent.
  [[nodiscard]] double value(const std::string& procedure, const std::string& round, const std::string& metric,
                             std::optional<double> tolerance = std::nullopt) const;
  [[nodiscard]] std::string to_csv() const;
};

/// Scores every finished (not timed out) round against the truthful baseline
/// of its profile. Envy is the subject's envy, measured with its valuation.
MetricsReport metrics(std::span<const SessionLog> logs, const MetricTolerances& tolerances = {});

// --- batch simulation --------------------------------------------------------

enum class PolicyKind { Truthful, BestResponse, RandomCut };
std::string_view to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(std::string_view s);

struct BatchConfig {
  double alpha = 1.0;  // fraction of truthful subjects
  std::vector<PolicyKind> kinds = {PolicyKind::BestResponse};  // drawn uniformly for the rest
  int repetitions = 100;
  std::uint64_t seed = 1;
  std::vector<Procedure> procedures = lab_procedures();
  std::map<std::string, Profile> profiles;  // as in SessionConfig
};

struct BatchResult {
  std::vector<SessionLog> logs;  // one per repetition
  MetricsReport report;
};

BatchResult simulate_batch(const BatchConfig& batch, const MetricTolerances& tolerances = {});

}  // namespace cakecut::experiment
