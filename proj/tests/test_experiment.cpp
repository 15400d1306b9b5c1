#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cakecut/experiment.hpp"
#include "cakecut/fixtures.hpp"
#include "support.hpp"

using namespace cakecut;
using namespace cakecut::experiment;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("cakecut-" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

SubmitOutcome answer_truthfully(Session& s) {
  s.start_round();
  return s.submit(truthful_action(s.profile()[0], *s.pending()));
}

void play_round(Session& s) {
  const auto n = s.results().size();
  while (s.results().size() == n) answer_truthfully(s);
}

void play_to_end(Session& s) {
  while (!s.done()) answer_truthfully(s);
}

SessionConfig short_config(int rounds = 2) {
  SessionConfig c;
  c.order = {Procedure::parse("2ACC"), Procedure::parse("3LD"), Procedure::parse("3SC")};
  c.rounds = rounds;
  c.reveal_round = rounds;
  return c;
}

}  // namespace

TEST_CASE("a full truthful session") {
  Session s("full", SessionConfig{});
  CHECK(s.config().total_rounds() == 56);
  CHECK(s.pending() == nullptr);
  play_to_end(s);
  REQUIRE(s.results().size() == 56);
  for (const auto& r : s.results()) {
    const auto proc = Procedure::parse(r.procedure);
    CHECK(r.points == run_truthful(proc, fixtures::lab_profile(r.procedure)).trace.subject_points());
    CHECK(r.revealed == (r.round >= 6));
    CHECK_FALSE(r.timed_out);
  }
  CHECK(s.results()[0].points == 60);
  CHECK_THROWS_AS((void)s.procedure(), SessionError);
  CHECK_THROWS_AS(s.submit(Action::cut(1)), SessionError);
}

TEST_CASE("three procedures take 21 rounds") {
  Session s("short", short_config(7));
  play_to_end(s);
  CHECK(s.results().size() == 21);
}

TEST_CASE("submit outcomes") {
  SessionConfig c = short_config(2);
  Session s("outcomes", c);
  CHECK_FALSE(s.revealed());
  auto out = s.submit(Action::cut(120));
  CHECK(out.kind == SubmitKind::RoundResult);
  REQUIRE(out.results.size() == 1);
  CHECK(out.results[0].points == 60);
  CHECK(s.round() == 2);
  CHECK(s.revealed());
  out = answer_truthfully(s);
  CHECK(out.kind == SubmitKind::ProcedureDone);
  CHECK(s.procedure().id() == "3LD");
  CHECK(s.round() == 1);

  // The subject cuts first in last diminisher; a diminished piece hands the
  // turn back for another cut.
  s.start_round();
  REQUIRE(s.pending()->kind == QueryKind::Cut);
  out = s.submit(Action::cut(590));
  CHECK(out.kind == SubmitKind::NextQuery);
  REQUIRE(out.next.has_value());
  CHECK(out.next->agent == 0);
  CHECK(s.pending() != nullptr);
  while (s.round() == 1) answer_truthfully(s);
  CHECK_THROWS_AS(s.submit(Action::choose(0)), ProtocolError);
  CHECK(to_string(SubmitKind::SessionDone) == "session_done");
}

TEST_CASE("timeout zeroes the rest of the procedure") {
  std::int64_t now = 0;
  SessionConfig c = short_config(3);
  c.enforce_time_limit = true;
  c.time_limit_ms = 1000;
  Session s("timeout", c, [&] { return now; });
  answer_truthfully(s);
  now += 500;  // between rounds: not charged
  s.start_round();
  CHECK(s.remaining_ms() == 1000);
  now += 1500;
  CHECK(s.remaining_ms() == 0);
  const auto out = s.submit(truthful_action(s.profile()[0], *s.pending()));
  CHECK(out.kind == SubmitKind::ProcedureDone);
  REQUIRE(out.results.size() == 2);
  for (const auto& r : out.results) {
    CHECK(r.timed_out);
    CHECK(r.points == 0);
  }
  CHECK(s.results()[0].points == 60);
  CHECK(s.procedure().id() == "3LD");
}

TEST_CASE("payment draws") {
  std::mt19937_64 rng(1);
  const std::vector<Points> pair{120, 80};
  CHECK(payment(pair, rng).pounds() == doctest::Approx(25.0));
  const std::vector<Points> zeros(56, 0);
  CHECK(payment(zeros, rng).pounds() == doctest::Approx(5.0));
  const std::vector<Points> full(56, 120);
  CHECK(payment(full, rng).pounds() == doctest::Approx(29.0));
  const std::vector<Points> one{10};
  CHECK_THROWS_AS(payment(one, rng), Error);

  std::vector<Points> idx(56);
  std::iota(idx.begin(), idx.end(), 0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = payment(idx, rng);
    CHECK(p.first != p.second);
    CHECK(p.pence == 500 + 10 * (p.first_points + p.second_points));
  }

  Session s("pay", short_config(1));
  CHECK_THROWS_AS(payment(s), SessionError);
  play_to_end(s);
  const auto a = payment(s), b = payment(s);
  CHECK(a.pence == b.pence);
  CHECK(a.first == b.first);
}

TEST_CASE("config validation and json") {
  SessionConfig bad;
  bad.rounds = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  SessionConfig mismatch;
  mismatch.profiles["3DS"] = fixtures::lab_profile("2acc");
  CHECK_THROWS_AS(mismatch.validate(), Error);

  SessionConfig c = short_config(3);
  c.profiles["3SC"] = fixtures::envy_manipulation_profile();
  c.seed = 77;
  const auto back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.profile_for(Procedure::parse("3SC")) == fixtures::envy_manipulation_profile());
  CHECK(back.profile_for(Procedure::parse("2ACC")) == fixtures::lab_profile("2acc"));
}

TEST_CASE("trace files round-trip and recover") {
  TempDir dir("traces");
  std::int64_t now = 0;
  Session s("s1", short_config(2), [&] { return now += 7; }, dir.path);
  CHECK_THROWS_AS(Session("s1", short_config(2), {}, dir.path), Error);
  for (int i = 0; i < 3; ++i) play_round(s);
  s.start_round();
  s.submit(Action::cut(590));  // mid-round, not persisted

  auto rec = Session::recover(dir.path / "s1.jsonl");
  CHECK(rec.results().size() == 3);
  CHECK(rec.procedure().id() == "3LD");
  CHECK(rec.round() == 2);
  CHECK_FALSE(rec.round_active());
  play_to_end(rec);
  rec.set_questionnaire({{"strategy", "cut where I liked"}});

  const auto log = read_log(dir.path / "s1.jsonl");
  CHECK(log.session == "s1");
  REQUIRE(log.records.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(io::Json(to_json(log.records[i])) == to_json(rec.records()[i]));
  }
  REQUIRE(log.questionnaire.has_value());
  CHECK((*log.questionnaire)["strategy"] == "cut where I liked");
  CHECK(to_jsonl(parse_log(to_jsonl(log))) == to_jsonl(log));

  // Tampered points are caught on replay.
  auto text = to_jsonl(log);
  auto j = io::Json::parse(text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1));
  j["points"][0] = 119;
  const auto header = text.substr(0, text.find('\n'));
  CHECK_THROWS_AS(parse_log(header + "\n" + j.dump() + "\n"), Error);
}

TEST_CASE("metrics from logs") {
  TempDir dir("metrics");
  for (int k = 0; k < 3; ++k) {
    Session s("m" + std::to_string(k), short_config(2), {}, dir.path);
    play_to_end(s);
  }
  const auto logs = read_logs(dir.path);
  REQUIRE(logs.size() == 3);
  const auto a = metrics(logs), b = metrics(logs);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.to_csv().rfind("procedure,round,metric,tolerance,value\n", 0) == 0);
  CHECK(a.value("2ACC", "all", "n") == 6);
  CHECK(a.value("2ACC", "1", "mean_points") == 60);
  CHECK(a.value("3SC", "all", "truthful_cut", 5) == 1);
  CHECK(a.value("3LD", "all", "truthful_payoff", 5) == 1);
  CHECK(a.value("2ACC", "all", "envy", 0) == 0);
  CHECK_THROWS_AS((void)a.value("4DS", "all", "n"), Error);
}

TEST_CASE("metric tolerances are monotone") {
  BatchConfig b;
  b.alpha = 0.3;
  b.kinds = {PolicyKind::RandomCut};
  b.repetitions = 40;
  b.procedures = {Procedure::parse("2ACC"), Procedure::parse("2SCC"), Procedure::parse("3DS"), Procedure::parse("3SC")};
  const auto rep = simulate_batch(b).report;
  for (const auto& proc : b.procedures) {
    const auto id = proc.id();
    CHECK(rep.value(id, "all", "envy", 0) >= rep.value(id, "all", "envy", 5));
    CHECK(rep.value(id, "all", "envy", 5) >= rep.value(id, "all", "envy", 10));
    CHECK(rep.value(id, "all", "truthful_payoff", 5) <= rep.value(id, "all", "truthful_payoff", 10));
    CHECK(rep.value(id, "all", "truthful_payoff", 10) <= rep.value(id, "all", "truthful_payoff", 15));
    CHECK(rep.value(id, "all", "manipulation_successful", 5) + rep.value(id, "all", "manipulation_unsuccessful", 5) <=
          1.0 + 1e-9);
  }
}

TEST_CASE("batch simulation") {
  BatchConfig b;
  b.repetitions = 5;
  b.procedures = {Procedure::parse("2ACC"), Procedure::parse("3DS")};
  const auto truthful = simulate_batch(b);
  CHECK(truthful.logs.size() == 5);
  CHECK(truthful.report.value("2ACC", "all", "envy", 0) == 0);
  CHECK(truthful.report.value("3DS", "all", "truthful_cut", 5) == 1);
  CHECK(truthful.report.value("2ACC", "all", "mean_points") == 60);

  b.alpha = 0;
  const auto br = simulate_batch(b);
  CHECK(br.report.value("2ACC", "all", "mean_points") == 120);
  CHECK(br.report.value("2ACC", "all", "truthful_cut", 5) == 0);
  CHECK(simulate_batch(b).report.to_csv() == br.report.to_csv());

  b.kinds = {PolicyKind::RandomCut, PolicyKind::BestResponse};
  b.seed = 2;
  CHECK(simulate_batch(b).report.to_csv() == simulate_batch(b).report.to_csv());
  CHECK(policy_kind_from_string("random-cut") == PolicyKind::RandomCut);
  CHECK(to_string(PolicyKind::BestResponse) == "best-response");
  CHECK_THROWS_AS(policy_kind_from_string("sneaky"), Error);
}
