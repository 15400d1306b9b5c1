#include <doctest.h>

#include "cakecut/fixtures.hpp"
#include "support.hpp"

using namespace cakecut;

namespace {

Profile identical(int n, Pixel width = 600) {
  Profile p{width, {}};
  for (int i = 0; i < n; ++i) p.agents.push_back(Valuation::uniform(width));
  return p;
}

int count_steps(const RoundTrace& t, int actor, QueryKind kind) {
  int n = 0;
  for (const auto& s : t.steps) n += s.actor == actor && s.query.kind == kind;
  return n;
}

}  // namespace

TEST_CASE("procedure ids") {
  CHECK(Procedure::parse("2acc").id() == "2ACC");
  CHECK(Procedure::parse("4Ep") == Procedure{ProcedureKind::EvenPaz, 4});
  CHECK(Procedure::parse("3SC").display_name() == "Super Fair");
  CHECK(Procedure::parse("2ACC").display_name() == "I Cut You Choose");
  CHECK(Procedure::parse("2SCC").display_name() == "Cut Middle");
  CHECK(Procedure::parse("3DS").display_name() == "Leftmost Leaves");
  CHECK(Procedure::parse("4LD").display_name() == "Last Challenger");
  CHECK(Procedure::parse("4EP").display_name() == "Super Fast");
  CHECK(Procedure::parse("5DS").agents == 5);
  CHECK_THROWS_AS(Procedure::parse("3ACC"), Error);
  CHECK_THROWS_AS(Procedure::parse("4SC"), Error);
  CHECK_THROWS_AS(Procedure::parse("1DS"), Error);
  CHECK_THROWS_AS(Procedure::parse("XYZ"), Error);
  CHECK(Procedure::parse("4DS").subject_stages() == 3);
  CHECK(Procedure::parse("8EP").subject_stages() == 3);
  CHECK(Procedure::parse("5EP").subject_stages() == 3);
  CHECK(Procedure::parse("4EP").subject_stages() == 2);

  std::vector<std::string> ids;
  for (const auto& p : lab_procedures()) ids.push_back(p.id());
  CHECK(ids == std::vector<std::string>{"2ACC", "2SCC", "3DS", "4DS", "3LD", "4LD", "4EP", "3SC"});
  for (auto k : {QueryKind::Cut, QueryKind::CutPair, QueryKind::Choose, QueryKind::Diminish, QueryKind::Trim})
    CHECK(query_kind_from_string(to_string(k)) == k);
}

TEST_CASE("truthful lab payoffs") {
  auto subject = [](const char* id) {
    return run_truthful(Procedure::parse(id), fixtures::lab_profile(id)).trace.subject_points();
  };
  CHECK(subject("2ACC") == 60);
  CHECK(subject("2SCC") == 90);
  CHECK(subject("3DS") == 40);
  CHECK(subject("4DS") == 30);
  for (const auto& proc : lab_procedures()) {
    CAPTURE(proc.id());
    const auto profile = fixtures::lab_profile(proc.id());
    const auto res = run_truthful(proc, profile);
    CHECK(res.allocation.is_partition(profile.width));
    CHECK(audit(profile, res.allocation).all_proportional());
  }
}

TEST_CASE("2acc chooser behaviour") {
  const auto p = fixtures::lab_profile("2acc");
  const auto proc = Procedure::parse("2ACC");
  std::vector<PolicyPtr> pol{scripted_policy(p[0], {Action::cut(430)}), truthful_policy(p[1])};
  const auto res = run(proc, p, pol);
  CHECK(p[1].value(0, 430) == 30);
  CHECK(p[1].value(430, 600) == 90);
  CHECK(res.allocation.pieces[1] == Piece::of(430, 600));
  CHECK(res.trace.subject_points() == 120);

  const auto same = identical(2);
  std::vector<PolicyPtr> tie{scripted_policy(same[0], {Action::cut(300)}), truthful_policy(same[1])};
  CHECK(run(proc, same, tie).allocation.pieces[1] == Piece::of(0, 300));
}

TEST_CASE("3ds second automaton cuts at 180 in the first stage") {
  const auto res = run_truthful(Procedure::parse("3DS"), fixtures::lab_profile("3ds"));
  bool seen = false;
  for (const auto& s : res.trace.steps)
    if (s.actor == 2 && s.query.kind == QueryKind::Cut && s.query.range.start == 0) {
      CHECK(s.action.cuts[0] == 180);
      seen = true;
    }
  CHECK(seen);
}

TEST_CASE("2scc midpoint and exact ties") {
  const auto p = fixtures::lab_profile("2scc");
  const auto proc = Procedure::parse("2SCC");
  std::vector<PolicyPtr> tie{scripted_policy(p[0], {Action::cut(220)}), truthful_policy(p[1])};
  const auto r = run(proc, p, tie);
  CHECK(r.allocation.pieces[0] == Piece::of(220, 600));
  CHECK(r.allocation.pieces[1] == Piece::of(0, 220));

  std::vector<PolicyPtr> odd{scripted_policy(p[0], {Action::cut(101)}), truthful_policy(p[1])};
  CHECK(run(proc, p, odd).allocation.pieces[0] == Piece::of(0, 160));
}

TEST_CASE("identical valuations: deterministic tie-breaks") {
  SUBCASE("dubins-spanier: lowest index leaves first") {
    const auto r = run_truthful(Procedure::parse("3DS"), identical(3));
    CHECK(r.allocation.pieces[0] == Piece::of(0, 200));
    CHECK(r.allocation.pieces[1] == Piece::of(200, 400));
    CHECK(r.allocation.pieces[2] == Piece::of(400, 600));
  }
  SUBCASE("last diminisher: nobody diminishes an exact share") {
    const auto r = run_truthful(Procedure::parse("3LD"), identical(3));
    CHECK(r.allocation.pieces[0] == Piece::of(0, 200));
    CHECK(count_steps(r.trace, 1, QueryKind::Diminish) == 1);
  }
  SUBCASE("even-paz: median split, lower agents go left") {
    const auto r = run_truthful(Procedure::parse("4EP"), identical(4));
    for (int i = 0; i < 4; ++i) CHECK(r.allocation.pieces[static_cast<std::size_t>(i)] == Piece::of(150 * i, 150 * (i + 1)));
  }
  SUBCASE("selfridge-conway: no trimming when the top two tie") {
    const auto r = run_truthful(Procedure::parse("3SC"), identical(3));
    CHECK(count_steps(r.trace, 1, QueryKind::Trim) == 1);
    int pairs = 0;
    for (const auto& s : r.trace.steps) pairs += s.query.kind == QueryKind::CutPair;
    CHECK(pairs == 1);
    CHECK(r.allocation.is_partition(600));
    CHECK(audit(identical(3), r.allocation).envy_free());
  }
}

TEST_CASE("last diminisher asks the subject again after being challenged") {
  const auto p = fixtures::lab_profile("3ld");
  const auto r = run_truthful(Procedure::parse("3LD"), p);
  CHECK(count_steps(r.trace, 0, QueryKind::Cut) >= 1);
  // A diminished first piece goes to the challenger; the subject then cuts the rest.
  const auto first_holder = r.trace.steps.front().actor;
  CHECK(first_holder == 0);
  int subject_cuts = count_steps(r.trace, 0, QueryKind::Cut);
  bool challenged = false;
  for (const auto& s : r.trace.steps)
    if (s.query.kind == QueryKind::Diminish && !s.action.is_pass() && s.query.range.start == 0) challenged = true;
  if (challenged) CHECK(subject_cuts == 2);
}

TEST_CASE("selfridge-conway with fixed subject cuts") {
  const auto p = fixtures::lab_profile("3sc");
  const auto pol = testing::truthful_policies(p);
  const Pixel c1 = cut_point(p[0], 0, 40), c2 = cut_point(p[0], 0, 80);
  const auto r = run_3sc(c1, c2, p, pol);
  CHECK(r.trace.subject_points() >= 40);
  CHECK(r.allocation.is_partition(600));

  // Degenerate cuts are legal; empty pieces are worth nothing.
  const auto d = run_3sc(0, 0, p, pol);
  CHECK(d.allocation.is_partition(600));

  const auto envy = fixtures::envy_manipulation_profile();
  const auto e = run_3sc(400, 500, envy, testing::truthful_policies(envy));
  const auto rep = audit(envy, e.allocation);
  CHECK(rep.points[0] == 6540);
  CHECK(rep.all_proportional());
}

TEST_CASE("protocol rejects invalid answers without changing state") {
  Protocol p(Procedure::parse("2ACC"), 600);
  const auto key = p.state_key();
  CHECK_THROWS_AS(p.apply(Action::cut(601)), ProtocolError);
  CHECK_THROWS_AS(p.apply(Action::cut(-1)), ProtocolError);
  CHECK_THROWS_AS(p.apply(Action::cut_pair(1, 2)), ProtocolError);
  CHECK_THROWS_AS(p.apply(Action::choose(0)), ProtocolError);
  CHECK(p.state_key() == key);
  p.apply(Action::cut(200));
  CHECK(p.pending().kind == QueryKind::Choose);
  CHECK_THROWS_AS(p.apply(Action::choose(2)), ProtocolError);
  p.apply(Action::choose(1));
  CHECK(p.done());
  CHECK_THROWS_AS((void)p.pending(), ProtocolError);

  Protocol sc(Procedure::parse("3SC"), 600);
  CHECK_THROWS_AS(sc.apply(Action::cut_pair(300, 200)), ProtocolError);
  sc.apply(Action::cut_pair(200, 400));
  CHECK(sc.pending().kind == QueryKind::Trim);
  CHECK_THROWS_AS(sc.apply(Action::trim(0, 250)), ProtocolError);

  Protocol ld(Procedure::parse("3LD"), 600);
  ld.apply(Action::cut(200));
  REQUIRE(ld.pending().kind == QueryKind::Diminish);
  CHECK_THROWS_AS(ld.apply(Action::cut(200)), ProtocolError);
  ld.apply(Action::pass());
}

TEST_CASE("replay reproduces allocations") {
  std::mt19937_64 rng(3);
  for (const auto& proc : lab_procedures()) {
    for (int rep = 0; rep < 30; ++rep) {
      const auto profile = testing::random_profile(rng, proc.agents);
      const auto r = run_truthful(proc, profile);
      const auto actions = r.trace.actions();
      CHECK(replay(proc, profile.width, actions) == r.allocation);
      auto extra = actions;
      extra.push_back(Action::cut(0));
      CHECK_THROWS_AS(replay(proc, profile.width, extra), Error);
      auto missing = actions;
      missing.pop_back();
      CHECK_THROWS_AS(replay(proc, profile.width, missing), Error);
    }
  }
}

TEST_CASE("runs are deterministic and allocations complete") {
  std::mt19937_64 rng(9);
  for (const auto& proc : lab_procedures()) {
    for (int rep = 0; rep < 30; ++rep) {
      const auto profile = testing::random_profile(rng, proc.agents);
      const auto a = run_truthful(proc, profile), b = run_truthful(proc, profile);
      CHECK(a.allocation == b.allocation);
      CHECK(a.trace.actions() == b.trace.actions());
      for (const auto& v : profile.agents) {
        Points sum = 0;
        for (const auto& piece : a.allocation.pieces) sum += value_of(v, piece);
        CHECK(sum == v.total());
      }
    }
  }
}

TEST_CASE("truthful play is proportional on random profiles") {
  std::mt19937_64 rng(21);
  for (const auto& proc : lab_procedures()) {
    for (int rep = 0; rep < 60; ++rep) {
      const auto profile = testing::random_profile(rng, proc.agents);
      CHECK(audit(profile, run_truthful(proc, profile).allocation).all_proportional());
    }
  }
  for (const char* id : {"5DS", "6LD", "5EP", "8EP"}) {
    const auto proc = Procedure::parse(id);
    for (int rep = 0; rep < 20; ++rep) {
      const auto profile = testing::random_profile(rng, proc.agents);
      CHECK(audit(profile, run_truthful(proc, profile).allocation).all_proportional());
    }
  }
}

TEST_CASE("cut-and-choose is envy-free under truthful play") {
  std::mt19937_64 rng(22);
  for (const char* id : {"2ACC", "2SCC"})
    for (int rep = 0; rep < 100; ++rep) {
      const auto profile = testing::random_profile(rng, 2);
      CHECK(audit(profile, run_truthful(Procedure::parse(id), profile).allocation).envy_free());
    }
}

TEST_CASE("trace timestamps come from the clock") {
  std::int64_t t = 0;
  RunOptions opts;
  opts.clock = [&] { return t += 10; };
  const auto p = fixtures::lab_profile("2acc");
  const auto r = run(Procedure::parse("2ACC"), p, testing::truthful_policies(p), opts);
  REQUIRE(r.trace.steps.size() == 2);
  CHECK(r.trace.steps[0].t_ms < r.trace.steps[1].t_ms);
}

TEST_CASE("run checks the profile size") {
  const auto p = fixtures::lab_profile("2acc");
  CHECK_THROWS_AS(run_truthful(Procedure::parse("3DS"), p), Error);
}
