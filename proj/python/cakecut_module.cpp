#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cakecut/experiment.hpp"
#include "cakecut/fixtures.hpp"
#include "cakecut/io.hpp"
#include "cakecut/learning.hpp"
#include "cakecut/service.hpp"
#include "cakecut/strategy.hpp"

namespace py = pybind11;
using namespace cakecut;

namespace {

using Triple = std::tuple<Pixel, Pixel, int>;

std::vector<Triple> allocation_rows(const Allocation& a) {
  std::vector<Triple> out;
  for (const auto& r : experiment::summarize(a)) out.emplace_back(r.start, r.end, r.agent);
  return out;
}

std::vector<Pixel> flat_cuts(const std::vector<Action>& actions) {
  std::vector<Pixel> out;
  for (const auto& a : actions) out.insert(out.end(), a.cuts.begin(), a.cuts.end());
  return out;
}

Profile profile_arg(const py::object& p) {
  if (py::isinstance<py::str>(p)) return io::load_profile(p.cast<std::string>());
  return p.cast<Profile>();
}

}  // namespace

PYBIND11_MODULE(cakecut, m) {
  m.doc() = "Discrete fair cake cutting";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<Valuation>(m, "Valuation")
      .def(py::init([](Pixel width, const std::vector<std::tuple<Pixel, Pixel, Points>>& weights) {
             std::vector<WeightedInterval> ws;
             for (const auto& [s, e, w] : weights) ws.push_back({s, e, w});
             return Valuation(width, std::move(ws));
           }),
           py::arg("width"), py::arg("weights"))
      .def_static("uniform", &Valuation::uniform)
      .def_property_readonly("width", &Valuation::width)
      .def_property_readonly("total", &Valuation::total)
      .def("value", py::overload_cast<Pixel, Pixel>(&Valuation::value, py::const_))
      .def("desired_intervals", [](const Valuation& v) {
        std::vector<std::pair<Pixel, Pixel>> out;
        for (const auto& iv : v.desired_intervals()) out.emplace_back(iv.start, iv.end);
        return out;
      });

  py::class_<Profile>(m, "Profile")
      .def(py::init([](Pixel width, std::vector<Valuation> agents) { return Profile{width, std::move(agents)}; }),
           py::arg("width"), py::arg("agents"))
      .def_readonly("width", &Profile::width)
      .def_readonly("agents", &Profile::agents)
      .def("__len__", &Profile::size);

  m.def("lab_profile_names", &fixtures::lab_profile_names);
  m.def("load_profile", &io::load_profile, py::arg("name_or_path"));

  m.def(
      "run_truthful",
      [](const std::string& procedure, const py::object& profile) {
        const auto prof = profile_arg(profile);
        const auto res = run_truthful(Procedure::parse(procedure), prof);
        const auto rep = audit(prof, res.allocation);
        py::dict d;
        d["points"] = res.trace.points;
        d["allocation"] = allocation_rows(res.allocation);
        d["proportional"] = rep.all_proportional();
        d["envy_free"] = rep.envy_free();
        return d;
      },
      py::arg("procedure"), py::arg("profile"));

  m.def(
      "best_response",
      [](const std::string& procedure, const py::object& profile, int role) {
        const auto br = best_response(Procedure::parse(procedure), profile_arg(profile), role);
        py::dict d;
        d["payoff"] = br.payoff;
        d["truthful_payoff"] = br.truthful_payoff;
        d["gain"] = br.gain;
        d["total"] = br.total;
        d["cuts"] = flat_cuts(br.actions);
        d["envious"] = br.envious_at_optimum;
        return d;
      },
      py::arg("procedure"), py::arg("profile"), py::arg("role") = 0);

  m.def(
      "verify_lemma",
      [](int which) {
        const auto rep = verify_lemma(which);
        return py::make_tuple(rep.pass, rep.to_text());
      },
      py::arg("lemma"));

  m.def("half_point", &learning::half_point, py::arg("valuation"));
  m.def(
      "plan",
      [](const Valuation& v, int rounds_left, Pixel s, std::optional<Pixel> t) {
        const auto p = learning::plan(v, rounds_left, {s, t.value_or(v.width())});
        return py::make_tuple(p.cut, p.expected_total.num, p.expected_total.den);
      },
      py::arg("valuation"), py::arg("rounds_left"), py::arg("s") = 0, py::arg("t") = py::none());

  m.def(
      "payment",
      [](const std::vector<Points>& points, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return experiment::payment(points, rng).pounds();
      },
      py::arg("round_points"), py::arg("seed") = 1);

  m.def(
      "simulate_batch",
      [](double alpha, const std::vector<std::string>& kinds, int repetitions, std::uint64_t seed,
         const std::vector<std::string>& procedures) {
        experiment::BatchConfig b;
        b.alpha = alpha;
        b.repetitions = repetitions;
        b.seed = seed;
        b.kinds.clear();
        for (const auto& k : kinds) b.kinds.push_back(experiment::policy_kind_from_string(k));
        if (!procedures.empty()) {
          b.procedures.clear();
          for (const auto& p : procedures) b.procedures.push_back(Procedure::parse(p));
        }
        return experiment::simulate_batch(b).report.to_csv();
      },
      py::arg("alpha") = 1.0, py::arg("kinds") = std::vector<std::string>{"best-response"},
      py::arg("repetitions") = 100, py::arg("seed") = 1, py::arg("procedures") = std::vector<std::string>{});

  // JSON in, JSON out: the same handlers the HTTP service uses.
  py::class_<service::SessionService>(m, "SessionService")
      .def(py::init([](std::optional<std::string> trace_dir, bool enforce_time_limit) {
             service::ServiceOptions o;
             if (trace_dir) o.trace_dir = *trace_dir;
             o.enforce_time_limit = enforce_time_limit;
             return std::make_unique<service::SessionService>(o);
           }),
           py::arg("trace_dir") = py::none(), py::arg("enforce_time_limit") = false)
      .def("create", [](service::SessionService& s, const std::string& body) {
        auto r = s.create(body);
        return py::make_tuple(r.status, r.body.dump());
      })
      .def("get", [](service::SessionService& s, const std::string& id) {
        auto r = s.get(id);
        return py::make_tuple(r.status, r.body.dump());
      })
      .def("act", [](service::SessionService& s, const std::string& id, const std::string& body) {
        auto r = s.act(id, body);
        return py::make_tuple(r.status, r.body.dump());
      })
      .def("payment", [](service::SessionService& s, const std::string& id) {
        auto r = s.payment(id);
        return py::make_tuple(r.status, r.body.dump());
      });
}
