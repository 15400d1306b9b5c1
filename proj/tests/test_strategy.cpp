#include <doctest.h>

#include "cakecut/fixtures.hpp"
#include "cakecut/strategy.hpp"
#include "support.hpp"

using namespace cakecut;

namespace {

// Direct scan for cut-and-choose: the chooser takes the left piece unless the
// right one is worth strictly more to it.
Points scan_2acc(const Profile& p) {
  const Pixel w = p.width;
  Points best = 0;
  for (Pixel x = 0; x <= w; ++x) {
    const bool left = p[1].value(0, x) >= p[1].value(x, w);
    best = std::max(best, left ? p[0].value(x, w) : p[0].value(0, x));
  }
  return best;
}

Points scan_by_run(const Procedure& proc, const Profile& p) {
  Points best = 0;
  for (Pixel x = 0; x <= p.width; ++x) {
    std::vector<PolicyPtr> pol{scripted_policy(p[0], {Action::cut(x)}), truthful_policy(p[1])};
    best = std::max(best, run(proc, p, pol).trace.subject_points());
  }
  return best;
}

}  // namespace

TEST_CASE("2acc best response on the lab profile") {
  const auto p = fixtures::lab_profile("2acc");
  const auto br = best_response(Procedure::parse("2ACC"), p);
  CHECK(br.payoff == 120);
  CHECK(br.truthful_payoff == 60);
  CHECK(br.gain == 60);
  CHECK(br.payoff == scan_2acc(p));
  REQUIRE(br.actions.size() == 1);
  CHECK(br.actions[0].cuts[0] == 430);
}

TEST_CASE("2-agent best responses match a direct scan") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    const auto p = testing::random_profile(rng, 2);
    CHECK(best_response(Procedure::parse("2ACC"), p).payoff == scan_2acc(p));
    CHECK(best_response(Procedure::parse("2SCC"), p).payoff == scan_by_run(Procedure::parse("2SCC"), p));
  }
}

TEST_CASE("best response is at least truthful and reproducible") {
  std::mt19937_64 rng(32);
  for (const auto& proc : lab_procedures()) {
    if (proc.agents > 3) continue;
    CAPTURE(proc.id());
    for (int rep = 0; rep < 3; ++rep) {
      const auto p = testing::random_profile(rng, proc.agents);
      const auto br = best_response(proc, p);
      CHECK(br.payoff >= br.truthful_payoff);
      CHECK(br.total == p[0].total());
      std::vector<PolicyPtr> pol{scripted_policy(p[0], br.actions)};
      for (int i = 1; i < proc.agents; ++i) pol.push_back(truthful_policy(p[static_cast<std::size_t>(i)]));
      const auto r = run(proc, p, pol);
      CHECK(r.trace.subject_points() == br.payoff);
      CHECK(r.allocation == br.allocation);
      CHECK(audit(p, r.allocation).envious[0] == br.envious_at_optimum);
    }
  }
}

TEST_CASE("first-round outcomes cover every cut") {
  const auto p = fixtures::lab_profile("2acc");
  const auto outs = first_round_outcomes(Procedure::parse("2ACC"), p);
  CHECK(outs.size() == 601);
  Points best = 0;
  for (const auto& o : outs) best = std::max(best, o.payoff);
  CHECK(best == 120);
}

TEST_CASE("identical valuations leave nothing to gain") {
  for (const char* id : {"2ACC", "2SCC", "3DS", "3LD", "3SC"}) {
    CAPTURE(id);
    const auto proc = Procedure::parse(id);
    Profile p{600, {}};
    for (int i = 0; i < proc.agents; ++i) p.agents.push_back(Valuation::uniform(600));
    CHECK(epsilon_gap(proc, p) == doctest::Approx(0.0));
  }
}

TEST_CASE("tightness gaps on block instances") {
  const auto rep = verify_lemma(3);
  CHECK(rep.pass);
  REQUIRE(rep.gaps.size() == lab_procedures().size());
  for (const auto& g : rep.gaps) {
    CAPTURE(g.procedure);
    const int n = Procedure::parse(g.procedure).agents;
    CHECK(g.gap >= double(n - 1) / n - kTightnessSlack);
    CHECK(g.payoff == g.total);
  }
}

TEST_CASE("envy witness under a single manipulation") {
  const auto p = fixtures::envy_manipulation_profile();
  const auto rep = verify_lemma(4);
  CHECK(rep.pass);
  CHECK(rep.truthful_payoff * 3 == rep.total);
  CHECK(rep.best_payoff > rep.truthful_payoff);
  REQUIRE(rep.witness_found);
  CHECK(rep.witness_payoff > rep.truthful_payoff);
  const auto r = run_3sc(rep.witness[0].cuts[0], rep.witness[0].cuts[1], p, testing::truthful_policies(p));
  CHECK(r.trace.subject_points() == rep.witness_payoff);
  CHECK(audit(p, r.allocation).envious[0]);
  CHECK_THROWS_AS(verify_lemma(2), Error);
}
