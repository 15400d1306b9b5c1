#include "cakecut/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "cakecut/fixtures.hpp"
#include "cakecut/strategy.hpp"

namespace cakecut::experiment {

using io::Json;

// --- config ------------------------------------------------------------------

Profile SessionConfig::profile_for(const Procedure& procedure) const {
  if (auto it = profiles.find(procedure.id()); it != profiles.end()) return it->second;
  try {
    return fixtures::lab_profile(procedure.id());
  } catch (const Error&) {
    throw Error("no profile for " + procedure.id());
  }
}

void SessionConfig::validate() const {
  if (order.empty()) throw Error("session needs at least one procedure");
  if (rounds < 1) throw Error("rounds must be positive");
  if (reveal_round < 1 || reveal_round > rounds) throw Error("reveal round must lie in [1, rounds]");
  if (time_limit_ms <= 0) throw Error("time limit must be positive");
  for (const auto& p : order) {
    const auto profile = profile_for(p);
    if (profile.size() != static_cast<std::size_t>(p.agents))
      throw Error(p.id() + " needs " + std::to_string(p.agents) + " valuations, profile has " +
                  std::to_string(profile.size()));
    if (auto issues = validate_profile(profile); !issues.empty()) throw Error(p.id() + " profile: " + issues.front());
  }
}

Json to_json(const SessionConfig& c) {
  Json order = Json::array(), profiles = Json::object();
  for (const auto& p : c.order) {
    order.push_back(p.id());
    profiles[p.id()] = io::to_json(c.profile_for(p));
  }
  return {{"order", order},
          {"rounds", c.rounds},
          {"reveal_round", c.reveal_round},
          {"time_limit_ms", c.time_limit_ms},
          {"enforce_time_limit", c.enforce_time_limit},
          {"seed", c.seed},
          {"subject", c.subject},
          {"profiles", profiles}};
}

SessionConfig config_from_json(const Json& j) {
  SessionConfig c;
  try {
    if (j.contains("order")) {
      c.order.clear();
      for (const auto& id : j.at("order")) c.order.push_back(Procedure::parse(id.get<std::string>()));
    }
    c.rounds = j.value("rounds", c.rounds);
    c.reveal_round = j.value("reveal_round", c.reveal_round);
    c.time_limit_ms = j.value("time_limit_ms", c.time_limit_ms);
    c.enforce_time_limit = j.value("enforce_time_limit", c.enforce_time_limit);
    c.seed = j.value("seed", c.seed);
    c.subject = j.value("subject", c.subject);
    if (j.contains("profiles"))
      for (const auto& [id, p] : j.at("profiles").items())
        c.profiles[Procedure::parse(id).id()] = io::profile_from_json(p);
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed session config: ") + e.what());
  }
  c.validate();
  return c;
}

// --- records -----------------------------------------------------------------

std::vector<AllocatedInterval> summarize(const Allocation& allocation) {
  std::vector<AllocatedInterval> out;
  for (std::size_t i = 0; i < allocation.pieces.size(); ++i)
    for (const auto& iv : allocation.pieces[i].intervals()) out.push_back({iv.start, iv.end, static_cast<int>(i)});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  return out;
}

RoundResult TraceRecord::result() const {
  RoundResult r;
  r.procedure = trace.procedure.id();
  r.round = round;
  r.points = timed_out ? 0 : trace.subject_points();
  r.subject_view_of_pieces = subject_view_of_pieces;
  r.allocation = summarize(trace.allocation);
  r.revealed = revealed;
  r.timed_out = timed_out;
  return r;
}

Json to_json(const TraceRecord& r) {
  Json actions = Json::array(), alloc = Json::array();
  for (const auto& s : r.trace.steps)
    actions.push_back({{"actor", s.actor},
                       {"query_kind", to_string(s.query.kind)},
                       {"value", io::action_value(s.query.kind, s.action)},
                       {"t_ms", s.t_ms}});
  for (const auto& a : summarize(r.trace.allocation)) alloc.push_back({a.start, a.end, a.agent});
  return {{"type", "round"},
          {"session", r.session},
          {"subject", r.subject},
          {"procedure", r.trace.procedure.id()},
          {"round", r.round},
          {"revealed", r.revealed},
          {"timed_out", r.timed_out},
          {"actions", actions},
          {"allocation", alloc},
          {"points", r.trace.points},
          {"subject_view_of_pieces", r.subject_view_of_pieces}};
}

TraceRecord record_from_json(const Json& j, const Profile& profile) {
  TraceRecord r;
  try {
    r.session = j.at("session").get<std::string>();
    r.subject = j.value("subject", "");
    r.round = j.at("round").get<int>();
    r.revealed = j.value("revealed", false);
    r.timed_out = j.value("timed_out", false);
    r.trace.procedure = Procedure::parse(j.at("procedure").get<std::string>());
    r.trace.subject = 0;

    Protocol p(r.trace.procedure, profile.width);
    for (const auto& a : j.at("actions")) {
      if (p.done()) throw Error("more actions than the procedure takes");
      const Query q = p.pending();
      const auto kind = query_kind_from_string(a.at("query_kind").get<std::string>());
      if (kind != q.kind || a.at("actor").get<int>() != q.agent)
        throw Error("recorded action does not answer the pending " + std::string(to_string(q.kind)) + " query");
      const Action act = io::action_from_value(kind, a.at("value"));
      p.apply(act);
      r.trace.steps.push_back({q, act, q.agent, a.value("t_ms", std::int64_t{0})});
    }
    const auto n = static_cast<std::size_t>(r.trace.procedure.agents);
    if (r.timed_out) {
      r.trace.allocation.pieces.assign(n, Piece{});
      r.trace.points.assign(n, 0);
      r.subject_view_of_pieces.assign(n, 0);
      return r;
    }
    if (!p.done()) throw Error("round ends before the procedure does");
    r.trace.allocation = p.allocation();
    r.trace.points = audit(profile, r.trace.allocation).points;
    for (const auto& piece : r.trace.allocation.pieces) r.subject_view_of_pieces.push_back(value_of(profile[0], piece));

    std::vector<AllocatedInterval> recorded;
    for (const auto& a : j.at("allocation")) recorded.push_back({a.at(0).get<Pixel>(), a.at(1).get<Pixel>(), a.at(2).get<int>()});
    if (recorded != summarize(r.trace.allocation)) throw Error("recorded allocation differs from the replay");
    if (j.at("points").get<std::vector<Points>>() != r.trace.points) throw Error("recorded points differ from the replay");
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed round record: ") + e.what());
  }
  return r;
}

std::string header_line(const std::string& session, const SessionConfig& config) {
  return Json{{"type", "session"}, {"session", session}, {"subject", config.subject}, {"config", to_json(config)}}
      .dump();
}

std::string to_jsonl(const SessionLog& log) {
  std::string out = header_line(log.session, log.config) + '\n';
  for (const auto& r : log.records) out += to_json(r).dump() + '\n';
  if (log.questionnaire)
    out += Json{{"type", "questionnaire"}, {"session", log.session}, {"answers", *log.questionnaire}}.dump() + '\n';
  return out;
}

SessionLog parse_log(const std::string& jsonl, const std::string& origin) {
  SessionLog log;
  bool header = false;
  std::istringstream in(jsonl);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = Json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "session") {
        log.session = j.at("session").get<std::string>();
        log.config = config_from_json(j.at("config"));
        header = true;
      } else if (!header) {
        throw Error("trace must start with a session line");
      } else if (type == "round") {
        const auto proc = Procedure::parse(j.at("procedure").get<std::string>());
        log.records.push_back(record_from_json(j, log.config.profile_for(proc)));
      } else if (type == "questionnaire") {
        log.questionnaire = j.at("answers");
      } else {
        throw Error("unknown line type " + type);
      }
    } catch (const std::exception& e) {
      throw Error(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw Error(origin + ": no session line");
  return log;
}

SessionLog read_log(const std::filesystem::path& path) { return parse_log(io::read_file(path), path.string()); }

std::vector<SessionLog> read_logs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SessionLog> out;
  for (const auto& f : files) out.push_back(read_log(f));
  return out;
}

// --- session -----------------------------------------------------------------

std::string_view to_string(SubmitKind kind) {
  switch (kind) {
    case SubmitKind::NextQuery:
      return "next_query";
    case SubmitKind::RoundResult:
      return "round_result";
    case SubmitKind::ProcedureDone:
      return "procedure_done";
    case SubmitKind::SessionDone:
      return "session_done";
  }
  return "?";
}

namespace {

std::int64_t steady_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

Session::Session(std::string id, SessionConfig config, Clock clock, std::optional<std::filesystem::path> trace_dir)
    : id_(std::move(id)), config_(std::move(config)), clock_(clock ? std::move(clock) : Clock(steady_ms)) {
  if (id_.empty()) throw Error("session id must not be empty");
  config_.validate();
  profile_ = config_.profile_for(config_.order.front());
  if (trace_dir) {
    std::filesystem::create_directories(*trace_dir);
    trace_file_ = *trace_dir / (id_ + ".jsonl");
    if (std::filesystem::exists(*trace_file_)) throw Error("trace for session " + id_ + " already exists");
    append_line(header_line(id_, config_));
  }
}

Session Session::recover(const std::filesystem::path& trace_file, Clock clock) {
  auto log = read_log(trace_file);
  Session s(log.session, log.config, std::move(clock));
  s.trace_file_ = trace_file;
  s.questionnaire_ = log.questionnaire;
  for (auto& r : log.records) {
    if (s.done()) throw Error(trace_file.string() + ": more rounds than the session has");
    if (r.trace.procedure != s.procedure() || r.round != s.round_)
      throw Error(trace_file.string() + ": rounds out of order");
    if (!r.trace.steps.empty() && !r.timed_out) s.elapsed_ms_ += r.trace.steps.back().t_ms;
    s.results_.push_back(r.result());
    s.records_.push_back(std::move(r));
    if (++s.round_ > s.config_.rounds) {
      s.round_ = 1;
      s.elapsed_ms_ = 0;
      if (++s.proc_index_ < s.config_.order.size()) s.profile_ = s.config_.profile_for(s.procedure());
    }
  }
  return s;
}

const Procedure& Session::procedure() const {
  if (done()) throw SessionError("session is complete");
  return config_.order[proc_index_];
}

const Profile& Session::profile() const {
  if (done()) throw SessionError("session is complete");
  return profile_;
}

const Query* Session::pending() const {
  if (!protocol_ || protocol_->done()) return nullptr;
  return &protocol_->pending();
}

std::int64_t Session::remaining_ms() const {
  std::int64_t used = elapsed_ms_;
  if (protocol_) used += now() - round_started_;
  return std::max<std::int64_t>(0, config_.time_limit_ms - used);
}

void Session::start_round() {
  if (done()) throw SessionError("session is complete");
  if (protocol_) return;
  protocol_.emplace(procedure(), profile_.width);
  steps_.clear();
  round_started_ = now();
  run_automata();
}

void Session::run_automata() {
  while (!protocol_->done() && protocol_->pending().agent != 0) {
    const Query q = protocol_->pending();
    const Action a = truthful_action(profile_[static_cast<std::size_t>(q.agent)], q);
    protocol_->apply(a);
    steps_.push_back({q, a, q.agent, now() - round_started_});
  }
}

SubmitOutcome Session::submit(const Action& action) {
  if (done()) throw SessionError("session is complete");
  SubmitOutcome out;
  start_round();
  if (expire(out)) return out;
  const Query q = protocol_->pending();
  protocol_->apply(action);  // validates before changing state
  steps_.push_back({q, action, 0, now() - round_started_});
  run_automata();
  if (!protocol_->done()) {
    out.kind = SubmitKind::NextQuery;
    out.next = protocol_->pending();
    return out;
  }
  finish_round(false, out);
  return out;
}

bool Session::expire(SubmitOutcome& out) {
  if (!config_.enforce_time_limit || remaining_ms() > 0) return false;
  const auto proc = proc_index_;
  while (!done() && proc_index_ == proc) finish_round(true, out);
  return true;
}

void Session::finish_round(bool timed_out, SubmitOutcome& out) {
  TraceRecord rec;
  rec.session = id_;
  rec.subject = config_.subject;
  rec.round = round_;
  rec.revealed = round_ >= config_.reveal_round;
  rec.timed_out = timed_out;
  rec.trace.procedure = procedure();
  rec.trace.subject = 0;
  const auto n = static_cast<std::size_t>(procedure().agents);
  if (timed_out) {
    // Steps of the interrupted round stay for the record; nothing is allocated.
    rec.trace.steps = steps_;
    rec.trace.allocation.pieces.assign(n, Piece{});
    rec.trace.points.assign(n, 0);
    rec.subject_view_of_pieces.assign(n, 0);
  } else {
    rec.trace.steps = steps_;
    rec.trace.allocation = protocol_->allocation();
    rec.trace.points = audit(profile_, rec.trace.allocation).points;
    for (const auto& piece : rec.trace.allocation.pieces) rec.subject_view_of_pieces.push_back(value_of(profile_[0], piece));
    elapsed_ms_ += now() - round_started_;
  }
  append_line(to_json(rec).dump());
  out.results.push_back(rec.result());
  results_.push_back(rec.result());
  records_.push_back(std::move(rec));
  protocol_.reset();
  steps_.clear();

  if (++round_ > config_.rounds) {
    round_ = 1;
    elapsed_ms_ = 0;
    ++proc_index_;
    if (!done()) profile_ = config_.profile_for(procedure());
    out.kind = done() ? SubmitKind::SessionDone : SubmitKind::ProcedureDone;
  } else {
    out.kind = SubmitKind::RoundResult;
  }
}

void Session::append_line(const std::string& line) const {
  if (!trace_file_) return;
  std::ofstream f(*trace_file_, std::ios::app | std::ios::binary);
  if (!f) throw Error("cannot append to " + trace_file_->string());
  f << line << '\n';
}

std::vector<Points> Session::round_points() const {
  std::vector<Points> out;
  for (const auto& r : results_) out.push_back(r.points);
  return out;
}

SessionLog Session::log() const { return {id_, config_, records_, questionnaire_}; }

void Session::set_questionnaire(Json answers) {
  questionnaire_ = std::move(answers);
  append_line(Json{{"type", "questionnaire"}, {"session", id_}, {"answers", *questionnaire_}}.dump());
}

// --- payment -----------------------------------------------------------------

Payment payment(std::span<const Points> round_points, std::mt19937_64& rng) {
  if (round_points.size() < 2) throw Error("payment needs at least two rounds");
  std::uniform_int_distribution<std::size_t> first(0, round_points.size() - 1);
  std::uniform_int_distribution<std::size_t> other(0, round_points.size() - 2);
  Payment p;
  p.first = first(rng);
  p.second = other(rng);
  if (p.second >= p.first) ++p.second;  // distinct rounds
  p.first_points = round_points[p.first];
  p.second_points = round_points[p.second];
  p.pence = kShowUpPence + (p.first_points + p.second_points) * 10;
  return p;
}

Payment payment(const Session& session) {
  if (!session.done()) throw SessionError("payment is drawn once the session is complete");
  std::mt19937_64 rng(session.config().seed);
  const auto points = session.round_points();
  return payment(points, rng);
}

// --- metrics -----------------------------------------------------------------

namespace {

struct Baseline {
  Points points = 0;
  std::vector<Pixel> first_cuts;
};

std::vector<Pixel> first_subject_cuts(const RoundTrace& t) {
  for (const auto& s : t.steps)
    if (s.actor == t.subject && (s.query.kind == QueryKind::Cut || s.query.kind == QueryKind::CutPair))
      return s.action.cuts;
  return {};
}

struct Tally {
  int n = 0;
  std::vector<int> envy, payoff;
  int truthful_cut = 0, successful = 0, unsuccessful = 0;
  double points = 0, seconds = 0;
};

std::string fmt_tolerance(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

double MetricsReport::value(const std::string& procedure, const std::string& round, const std::string& metric,
                            std::optional<double> tolerance) const {
  for (const auto& r : rows)
    if (r.procedure == procedure && r.round == round && r.metric == metric && r.tolerance == tolerance) return r.value;
  throw Error("no metric " + metric + " for " + procedure + " round " + round);
}

std::string MetricsReport::to_csv() const {
  std::ostringstream os;
  os << "procedure,round,metric,tolerance,value\n";
  for (const auto& r : rows) {
    os << r.procedure << ',' << r.round << ',' << r.metric << ',';
    if (r.tolerance) os << fmt_tolerance(*r.tolerance);
    os << ',' << r.value << '\n';
  }
  return os.str();
}

MetricsReport metrics(std::span<const SessionLog> logs, const MetricTolerances& tol) {
  std::map<std::string, Baseline> baselines;  // procedure id + profile
  std::vector<std::string> proc_order;
  std::map<std::string, std::map<int, Tally>> by_round;
  std::map<std::string, Tally> overall;
  std::map<std::string, std::map<std::string, double>> session_seconds;  // procedure -> session -> total

  auto bump = [&](Tally& t, const std::vector<bool>& envy, const std::vector<bool>& payoff, bool cut_ok, Points pts,
                  Points base, double secs) {
    if (t.envy.empty()) t.envy.assign(envy.size(), 0), t.payoff.assign(payoff.size(), 0);
    ++t.n;
    for (std::size_t i = 0; i < envy.size(); ++i) t.envy[i] += envy[i];
    for (std::size_t i = 0; i < payoff.size(); ++i) t.payoff[i] += payoff[i];
    t.truthful_cut += cut_ok;
    t.successful += !cut_ok && pts > base;
    t.unsuccessful += !cut_ok && pts <= base;
    t.points += static_cast<double>(pts);
    t.seconds += secs;
  };

  for (const auto& log : logs) {
    for (const auto& rec : log.records) {
      if (rec.timed_out) continue;
      const auto& proc = rec.trace.procedure;
      const auto profile = log.config.profile_for(proc);
      const auto key = proc.id() + io::to_json(profile).dump();
      auto it = baselines.find(key);
      if (it == baselines.end()) {
        const auto truthful = run_truthful(proc, profile, rec.trace.subject).trace;
        it = baselines.emplace(key, Baseline{truthful.subject_points(), first_subject_cuts(truthful)}).first;
      }
      const auto& base = it->second;
      const auto subject = static_cast<std::size_t>(rec.trace.subject);
      const Points pts = rec.trace.subject_points();

      std::vector<bool> envy, payoff;
      for (Points t : tol.envy) envy.push_back(audit(profile, rec.trace.allocation, t).envious[subject]);
      for (Points t : tol.payoff) payoff.push_back(std::abs(pts - base.points) <= t);
      const auto cuts = first_subject_cuts(rec.trace);
      bool cut_ok = cuts.size() == base.first_cuts.size();
      for (std::size_t i = 0; cut_ok && i < cuts.size(); ++i) cut_ok = std::abs(cuts[i] - base.first_cuts[i]) <= tol.cut_pixels;
      const double secs = rec.trace.steps.empty() ? 0.0 : static_cast<double>(rec.trace.steps.back().t_ms) / 1000.0;

      if (!by_round.contains(proc.id())) proc_order.push_back(proc.id());
      bump(by_round[proc.id()][rec.round], envy, payoff, cut_ok, pts, base.points, secs);
      bump(overall[proc.id()], envy, payoff, cut_ok, pts, base.points, secs);
      session_seconds[proc.id()][log.session] += secs;
    }
  }

  MetricsReport rep;
  auto emit = [&](const std::string& proc, const std::string& round, const Tally& t, double secs) {
    const double n = t.n;
    auto row = [&](std::string metric, std::optional<double> tolerance, double value) {
      rep.rows.push_back({proc, round, std::move(metric), tolerance, value});
    };
    row("n", std::nullopt, n);
    for (std::size_t i = 0; i < tol.envy.size(); ++i) row("envy", static_cast<double>(tol.envy[i]), t.envy[i] / n);
    for (std::size_t i = 0; i < tol.payoff.size(); ++i)
      row("truthful_payoff", static_cast<double>(tol.payoff[i]), t.payoff[i] / n);
    row("truthful_cut", tol.cut_pixels, t.truthful_cut / n);
    row("manipulation_successful", tol.cut_pixels, t.successful / n);
    row("manipulation_unsuccessful", tol.cut_pixels, t.unsuccessful / n);
    row("mean_points", std::nullopt, t.points / n);
    row("mean_time_s", std::nullopt, secs);
  };
  for (const auto& proc : proc_order) {
    for (const auto& [round, t] : by_round[proc]) emit(proc, std::to_string(round), t, t.seconds / t.n);
    double per_session = 0;
    for (const auto& [s, secs] : session_seconds[proc]) per_session += secs;
    emit(proc, "all", overall[proc], per_session / static_cast<double>(session_seconds[proc].size()));
  }
  return rep;
}

// --- batch -------------------------------------------------------------------

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Truthful:
      return "truthful";
    case PolicyKind::BestResponse:
      return "best-response";
    case PolicyKind::RandomCut:
      return "random-cut";
  }
  return "?";
}

PolicyKind policy_kind_from_string(std::string_view s) {
  for (auto k : {PolicyKind::Truthful, PolicyKind::BestResponse, PolicyKind::RandomCut})
    if (to_string(k) == s) return k;
  throw Error("unknown policy kind: " + std::string(s));
}

namespace {

// Cuts uniformly at random, answers everything else truthfully.
class RandomCutPolicy : public Policy {
 public:
  RandomCutPolicy(Valuation v, std::uint64_t seed) : v_(std::move(v)), rng_(seed) {}
  Action respond(const Query& q) override {
    std::uniform_int_distribution<Pixel> d(q.range.start, q.range.end);
    if (q.kind == QueryKind::Cut) return Action::cut(d(rng_));
    if (q.kind == QueryKind::CutPair) {
      Pixel a = d(rng_), b = d(rng_);
      return Action::cut_pair(std::min(a, b), std::max(a, b));
    }
    return truthful_action(v_, q);
  }

 private:
  Valuation v_;
  std::mt19937_64 rng_;
};

}  // namespace

BatchResult simulate_batch(const BatchConfig& batch, const MetricTolerances& tolerances) {
  if (!(batch.alpha >= 0.0 && batch.alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
  if (batch.repetitions < 1) throw Error("repetitions must be positive");
  if (batch.alpha < 1.0 && batch.kinds.empty()) throw Error("alpha below 1 needs at least one policy kind");

  SessionConfig cfg;
  cfg.order = batch.procedures;
  cfg.profiles = batch.profiles;
  cfg.rounds = 1;
  cfg.reveal_round = 1;
  cfg.seed = batch.seed;
  cfg.subject = "batch";
  cfg.validate();

  std::map<std::string, Profile> profiles;
  std::map<std::string, std::vector<Action>> best;
  for (const auto& p : cfg.order) profiles[p.id()] = cfg.profile_for(p);

  std::mt19937_64 rng(batch.seed);
  std::bernoulli_distribution truthful(batch.alpha);
  BatchResult out;
  for (int rep = 0; rep < batch.repetitions; ++rep) {
    SessionLog log{"batch-" + std::to_string(rep), cfg, {}, std::nullopt};
    for (const auto& proc : cfg.order) {
      const auto& profile = profiles[proc.id()];
      const bool honest = truthful(rng);
      const std::size_t pick = batch.kinds.empty()
                                   ? 0
                                   : std::uniform_int_distribution<std::size_t>(0, batch.kinds.size() - 1)(rng);
      const std::uint64_t seed = rng();
      const auto kind = honest ? PolicyKind::Truthful : batch.kinds[pick];

      std::vector<PolicyPtr> policies;
      for (const auto& v : profile.agents) policies.push_back(truthful_policy(v));
      if (kind == PolicyKind::BestResponse) {
        auto it = best.find(proc.id());
        if (it == best.end()) it = best.emplace(proc.id(), best_response(proc, profile).actions).first;
        policies[0] = scripted_policy(profile[0], it->second);
      } else if (kind == PolicyKind::RandomCut) {
        policies[0] = std::make_shared<RandomCutPolicy>(profile[0], seed);
      }

      auto res = run(proc, profile, policies);
      TraceRecord rec;
      rec.session = log.session;
      rec.subject = cfg.subject;
      rec.round = 1;
      rec.revealed = true;
      rec.trace = std::move(res.trace);
      for (const auto& piece : rec.trace.allocation.pieces) rec.subject_view_of_pieces.push_back(value_of(profile[0], piece));
      log.records.push_back(std::move(rec));
    }
    out.logs.push_back(std::move(log));
  }
  out.report = metrics(out.logs, tolerances);
  return out;
}

}  // namespace cakecut::experiment
