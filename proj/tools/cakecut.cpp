// Command-line front end: serve the session API, run batches, search best
// responses, check the manipulation bounds, score traces and plan cuts.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cakecut/experiment.hpp"
#include "cakecut/fixtures.hpp"
#include "cakecut/io.hpp"
#include "cakecut/learning.hpp"
#include "cakecut/service.hpp"
#include "cakecut/strategy.hpp"

using namespace cakecut;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

service::HttpServer* g_server = nullptr;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string cuts_text(const std::vector<Action>& actions) {
  std::string s;
  for (const auto& a : actions)
    for (Pixel c : a.cuts) s += (s.empty() ? "" : ",") + std::to_string(c);
  return s.empty() ? "-" : s;
}

// "2acc" names both a fixture and its procedure; files need --procedure.
Procedure procedure_for(const std::string& profile, const std::string& procedure) {
  if (!procedure.empty()) return Procedure::parse(procedure);
  return Procedure::parse(profile);
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete fair cake cutting: procedures, manipulation search and lab sessions"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the session API over HTTP");
  std::string host = "127.0.0.1", trace_dir = "traces";
  int port = 8080;
  bool no_time_limit = false;
  serve->add_option("--host", host, "Address to bind");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--trace-dir", trace_dir, "Directory for session traces");
  serve->add_flag("--no-time-limit", no_time_limit, "Do not enforce the per-procedure time limit by default");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate a population of subjects against truthful automata");
  experiment::BatchConfig batch;
  std::string kinds = "best-response", procedures, out_dir, csv_path;
  std::vector<std::string> profile_overrides;
  simulate->add_option("--alpha", batch.alpha, "Fraction of truthful subjects")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--kinds", kinds, "Comma-separated policies for the rest: best-response, random-cut");
  simulate->add_option("--repetitions", batch.repetitions, "Subjects per procedure")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", batch.seed, "Random seed");
  simulate->add_option("--procedures", procedures, "Comma-separated procedure ids (default: the lab order)");
  simulate->add_option("--profile", profile_overrides, "ID=fixture-or-file, e.g. 3SC=envy.json");
  simulate->add_option("--traces", out_dir, "Write one JSONL trace per repetition here");
  simulate->add_option("--csv", csv_path, "Write the metrics CSV here instead of stdout");

  // best-response
  auto* br = app.add_subcommand("best-response", "Exhaustive best response of one agent");
  std::string br_profile, br_procedure;
  int role = 0;
  br->add_option("--profile", br_profile, "Fixture name or profile JSON file")->required();
  br->add_option("--procedure", br_procedure, "Procedure id (defaults to the fixture's)");
  br->add_option("--role", role, "Strategic agent index");

  // verify-lemma
  auto* verify = app.add_subcommand("verify-lemma", "Check the manipulation bounds numerically");
  int lemma = 0;
  verify->add_option("lemma", lemma, "3 (tightness) or 4 (envy under manipulation)")
      ->required()
      ->check(CLI::IsMember({3, 4}));

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "Score a directory of session traces");
  std::string audit_dir, audit_out;
  std::vector<Points> envy_tolerance;
  audit_cmd->add_option("traces", audit_dir, "Directory of JSONL traces")->required()->check(CLI::ExistingDirectory);
  audit_cmd->add_option("--tolerance", envy_tolerance, "Envy tolerance in points (repeatable; default 0,5,10)");
  audit_cmd->add_option("--out", audit_out, "Write the CSV here instead of stdout");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Plan cut-and-choose cuts against an unknown half point");
  std::string plan_profile = "2acc";
  int agent = 0, rounds = 5, opponent = -1;
  Pixel s = 0, t = -1;
  plan_cmd->add_option("--profile", plan_profile, "Fixture name or profile JSON file");
  plan_cmd->add_option("--agent", agent, "Planning agent within the profile");
  plan_cmd->add_option("--rounds", rounds, "Rounds left")->check(CLI::PositiveNumber);
  plan_cmd->add_option("-s", s, "Known lower bound on the half point (exclusive)");
  plan_cmd->add_option("-t", t, "Known upper bound on the half point (inclusive; default cake width)");
  plan_cmd->add_option("--opponent-half-point", opponent,
                       "Half point to play against (default: the other agent's; 0 skips play)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*serve) {
      service::ServiceOptions opts;
      opts.trace_dir = trace_dir;
      opts.enforce_time_limit = !no_time_limit;
      service::SessionService svc(opts);
      service::HttpServer server(svc);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
      });
      std::signal(SIGTERM, [](int) {
        if (g_server) g_server->stop();
      });
      std::cerr << "serving on http://" << host << ':' << bound << " (" << svc.size() << " sessions recovered)\n";
      server.listen();
      return kPass;
    }

    if (*simulate) {
      batch.kinds.clear();
      for (const auto& k : split(kinds, ',')) batch.kinds.push_back(experiment::policy_kind_from_string(k));
      if (!procedures.empty()) {
        batch.procedures.clear();
        for (const auto& id : split(procedures, ',')) batch.procedures.push_back(Procedure::parse(id));
      }
      for (const auto& o : profile_overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw Error("--profile expects ID=fixture-or-file, got " + o);
        batch.profiles[Procedure::parse(o.substr(0, eq)).id()] = io::load_profile(o.substr(eq + 1));
      }
      const auto result = experiment::simulate_batch(batch);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (const auto& log : result.logs) {
          std::ofstream f(std::filesystem::path(out_dir) / (log.session + ".jsonl"), std::ios::binary);
          f << experiment::to_jsonl(log);
        }
      }
      write_or_print(csv_path, result.report.to_csv());
      return kPass;
    }

    if (*br) {
      const auto profile = io::load_profile(br_profile);
      const auto proc = procedure_for(br_profile, br_procedure);
      const auto res = best_response(proc, profile, role);
      std::cout << "procedure        " << proc.id() << " (" << proc.display_name() << ")\n"
                << "truthful payoff  " << res.truthful_payoff << " / " << res.total << '\n'
                << "best payoff      " << res.payoff << " / " << res.total << '\n'
                << "gain             " << res.gain << '\n'
                << "cuts             " << cuts_text(res.actions) << '\n'
                << "envious          " << (res.envious_at_optimum ? "yes" : "no") << '\n';
      return kPass;
    }

    if (*verify) {
      const auto rep = verify_lemma(lemma);
      std::cout << rep.to_text();
      return rep.pass ? kPass : kFail;
    }

    if (*audit_cmd) {
      experiment::MetricTolerances tol;
      if (!envy_tolerance.empty()) tol.envy = envy_tolerance;
      const auto logs = experiment::read_logs(audit_dir);
      write_or_print(audit_out, experiment::metrics(logs, tol).to_csv());
      return kPass;
    }

    if (*plan_cmd) {
      const auto profile = io::load_profile(plan_profile);
      if (agent < 0 || static_cast<std::size_t>(agent) >= profile.size()) throw Error("agent out of range");
      const auto& v = profile[static_cast<std::size_t>(agent)];
      learning::KnowledgeState k{s, t < 0 ? v.width() : t};
      learning::Planner planner(v);
      const auto p = planner.plan(rounds, k);
      const auto m = planner.myopic(k);
      std::cout << "knowledge        (" << k.s << ", " << k.t << "]\n"
                << "planned cut      " << p.cut << "  expected total " << p.expected_total.to_double() << " over "
                << rounds << " rounds\n"
                << "myopic cut       " << m.cut << "  expected " << m.expected_total.to_double() << " this round\n";
      if (opponent != 0 && profile.size() == 2) {
        const Pixel h = opponent > 0 ? opponent : learning::half_point(profile[1 - static_cast<std::size_t>(agent)]);
        for (auto kind : {learning::LearnerKind::Optimal, learning::LearnerKind::Myopic}) {
          const auto run = learning::simulate_learning(v, h, rounds, kind);
          std::cout << (kind == learning::LearnerKind::Optimal ? "planned play" : "myopic play ") << "     vs h=" << h
                    << ':';
          for (std::size_t i = 0; i < run.rounds.size(); ++i)
            std::cout << ' ' << run.rounds[i].cut << "->" << run.payoffs[i];
          std::cout << '\n';
        }
      }
      return kPass;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
