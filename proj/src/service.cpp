#include "cakecut/service.hpp"

#include <iostream>
#include <random>
#include <regex>

#include <httplib.h>

#include "cakecut/fixtures.hpp"

namespace cakecut::service {

using experiment::RoundResult;
using experiment::Session;
using io::Json;

std::string instructions(const Procedure& p) {
  switch (p.kind) {
    case ProcedureKind::AsymmetricCutChoose:
      return "Cut the cake once. The other player takes the piece they like more and you get the rest.";
    case ProcedureKind::SymmetricCutChoose:
      return "You and the other player each mark a cut. The cake is split halfway between the two marks, "
             "and whoever marked further left gets the left piece.";
    case ProcedureKind::DubinsSpanier:
      return "Everyone still in the game marks where a left piece would end. The owner of the leftmost mark "
             "takes that piece and leaves. The rest repeat on what remains.";
    case ProcedureKind::LastDiminisher:
      return "One player marks a left piece and each other player may shrink it in turn. The last one to "
             "shrink it takes it. You may need to cut more than once.";
    case ProcedureKind::EvenPaz:
      return "Everyone marks a cut. The cake is split at the middle mark and each side is divided again "
             "among the players whose marks fell on it.";
    case ProcedureKind::SelfridgeConway:
      return "Use two knives to cut the cake into three pieces. The other players choose before you. "
             "A piece may be trimmed first, and the trimmings are shared out afterwards.";
  }
  return {};
}

namespace {

Json intervals_json(const std::vector<Interval>& ivs) {
  Json out = Json::array();
  for (const auto& iv : ivs) out.push_back(io::to_json(iv));
  return out;
}

Json result_json(const RoundResult& r) {
  Json alloc = Json::array();
  for (const auto& a : r.allocation) alloc.push_back({a.start, a.end, a.agent});
  return {{"procedure", r.procedure},
          {"round", r.round},
          {"points", r.points},
          {"subject_view_of_pieces", r.subject_view_of_pieces},
          {"allocation", alloc},
          {"revealed", r.revealed},
          {"timed_out", r.timed_out}};
}

Json procedure_json(const Procedure& p) {
  return {{"id", p.id()}, {"name", p.display_name()}, {"agents", p.agents}, {"instructions", instructions(p)}};
}

Json valuation_json(const Valuation& v) {
  Json w = Json::array();
  for (const auto& wi : v.weights()) w.push_back({wi.start, wi.end, wi.weight});
  return {{"desired", intervals_json(v.desired_intervals())}, {"weights", w}, {"total", v.total()}};
}

Json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  return Json::parse(body);  // parse_error is reported as 400 by the caller
}

bool valid_id(const std::string& id) {
  static const std::regex re("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(id, re);
}

}  // namespace

Json session_view(const Session& s) {
  Json procs = Json::array();
  for (const auto& p : s.config().order) procs.push_back({{"id", p.id()}, {"name", p.display_name()}});
  Json history = Json::array();
  Points total = 0;
  for (const auto& r : s.results()) {
    history.push_back(result_json(r));
    total += r.points;
  }
  Json v{{"id", s.id()},
         {"subject", s.config().subject},
         {"done", s.done()},
         {"procedures", procs},
         {"procedure_index", s.procedure_index()},
         {"rounds", s.config().rounds},
         {"reveal_round", s.config().reveal_round},
         {"time_limit_ms", s.config().time_limit_ms},
         {"enforce_time_limit", s.config().enforce_time_limit},
         {"history", history},
         {"total_points", total}};
  if (s.done()) {
    v["procedure"] = nullptr;
    v["round"] = nullptr;
    v["pending"] = nullptr;
    v["revealed"] = false;
    v["round_active"] = false;
    v["own"] = nullptr;
    v["opponents"] = Json::array();
    v["remaining_ms"] = 0;
    return v;
  }
  v["procedure"] = procedure_json(s.procedure());
  v["round"] = s.round();
  v["round_active"] = s.round_active();
  v["revealed"] = s.revealed();
  v["remaining_ms"] = s.remaining_ms();
  v["pending"] = s.pending() ? io::to_json(*s.pending()) : Json(nullptr);
  const auto& profile = s.profile();
  v["cake_pixels"] = profile.width;
  v["own"] = valuation_json(profile[0]);
  Json opponents = Json::array();
  if (s.revealed())
    for (std::size_t i = 1; i < profile.size(); ++i)
      opponents.push_back({{"agent", i}, {"desired", intervals_json(profile[i].desired_intervals())}});
  v["opponents"] = opponents;
  return v;
}

Response error(int status, const std::string& message) {
  return {status, {{"error", {{"status", status}, {"message", message}}}}};
}

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {
  if (!options_.trace_dir || !std::filesystem::is_directory(*options_.trace_dir)) return;
  for (const auto& e : std::filesystem::directory_iterator(*options_.trace_dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".jsonl") continue;
    try {
      auto entry = std::make_shared<Entry>();
      entry->session = std::make_unique<Session>(Session::recover(e.path(), options_.clock));
      sessions_.emplace(entry->session->id(), std::move(entry));
    } catch (const std::exception& ex) {
      std::cerr << "skipping " << e.path() << ": " << ex.what() << '\n';
    }
  }
}

std::size_t SessionService::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::string SessionService::fresh_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%04llu-%04x", static_cast<unsigned long long>(++counter_),
                static_cast<unsigned>(rng() & 0xffff));
  return buf;
}

Response SessionService::create(const std::string& body) {
  Json req;
  try {
    req = parse_body(body);
  } catch (const Json::parse_error& e) {
    return error(400, std::string("malformed JSON: ") + e.what());
  }
  if (!req.is_object()) return error(400, "request body must be a JSON object");
  experiment::SessionConfig config;
  try {
    Json cj = req.value("config", Json::object());
    if (!cj.is_object()) return error(400, "config must be an object");
    if (!cj.contains("enforce_time_limit")) cj["enforce_time_limit"] = options_.enforce_time_limit;
    config = experiment::config_from_json(cj);
  } catch (const std::exception& e) {
    return error(400, e.what());
  }

  std::lock_guard lock(mutex_);
  std::string id;
  if (req.contains("id")) {
    if (!req["id"].is_string() || !valid_id(req["id"].get<std::string>()))
      return error(400, "session id must be 1-64 letters, digits, '-' or '_'");
    id = req["id"].get<std::string>();
    if (sessions_.contains(id)) return error(409, "session " + id + " already exists");
  } else {
    do id = fresh_id();
    while (sessions_.contains(id));
  }
  try {
    auto entry = std::make_shared<Entry>();
    entry->session = std::make_unique<Session>(id, std::move(config), options_.clock, options_.trace_dir);
    auto view = session_view(*entry->session);
    sessions_.emplace(id, std::move(entry));
    return {201, view};
  } catch (const std::exception& e) {
    return error(409, e.what());
  }
}

Response SessionService::get(const std::string& id) {
  auto entry = find(id);
  if (!entry) return error(404, "no session " + id);
  std::lock_guard lock(entry->mutex);
  return {200, session_view(*entry->session)};
}

Response SessionService::act(const std::string& id, const std::string& body) {
  auto entry = find(id);
  if (!entry) return error(404, "no session " + id);
  Json req;
  try {
    req = parse_body(body);
  } catch (const Json::parse_error& e) {
    return error(400, std::string("malformed JSON: ") + e.what());
  }
  std::lock_guard lock(entry->mutex);
  auto& s = *entry->session;
  if (s.done()) return error(409, "session is complete");
  try {
    if (req.is_object() && req.size() == 1 && req.value("start", false)) {
      s.start_round();
      return {200, {{"outcome", "started"}, {"results", Json::array()}, {"next", io::to_json(*s.pending())},
                    {"session", session_view(s)}}};
    }
    const auto outcome = s.submit(io::action_from_request(req));
    Json results = Json::array();
    for (const auto& r : outcome.results) results.push_back(result_json(r));
    return {200,
            {{"outcome", experiment::to_string(outcome.kind)},
             {"results", results},
             {"next", outcome.next ? io::to_json(*outcome.next) : Json(nullptr)},
             {"session", session_view(s)}}};
  } catch (const experiment::SessionError& e) {
    return error(409, e.what());
  } catch (const Error& e) {
    return error(400, e.what());
  }
}

Response SessionService::questionnaire(const std::string& id, const std::string& body) {
  auto entry = find(id);
  if (!entry) return error(404, "no session " + id);
  Json req;
  try {
    req = parse_body(body);
  } catch (const Json::parse_error& e) {
    return error(400, std::string("malformed JSON: ") + e.what());
  }
  std::lock_guard lock(entry->mutex);
  entry->session->set_questionnaire(req);
  return {200, {{"stored", true}}};
}

Response SessionService::payment(const std::string& id) {
  auto entry = find(id);
  if (!entry) return error(404, "no session " + id);
  std::lock_guard lock(entry->mutex);
  const auto& s = *entry->session;
  if (!s.done()) return error(409, "payment is drawn once the session is complete");
  const auto p = experiment::payment(s);
  auto drawn = [&](std::size_t i) {
    const auto& r = s.results()[i];
    return Json{{"index", i}, {"procedure", r.procedure}, {"round", r.round}, {"points", r.points}};
  };
  return {200, {{"pence", p.pence}, {"pounds", p.pounds()}, {"drawn", {drawn(p.first), drawn(p.second)}}}};
}

Response SessionService::profiles() const {
  // Only the subject's valuation: automata valuations stay hidden until a
  // session reveals them.
  Json out = Json::array();
  for (const auto& name : fixtures::lab_profile_names()) {
    const auto profile = fixtures::lab_profile(name);
    const auto proc = Procedure::parse(name);
    out.push_back({{"name", name},
                   {"procedure", procedure_json(proc)},
                   {"cake_pixels", profile.width},
                   {"agents", profile.size()},
                   {"subject", valuation_json(profile[0])}});
  }
  return {200, {{"profiles", out}}};
}

// --- HTTP --------------------------------------------------------------------

HttpServer::HttpServer(SessionService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Post("/sessions", [&, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.create(req.body));
  });
  srv.Get(R"(/sessions/([A-Za-z0-9_-]+))", [&, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.get(req.matches[1]));
  });
  srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/actions)", [&, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.act(req.matches[1], req.body));
  });
  srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/questionnaire)",
           [&, send](const httplib::Request& req, httplib::Response& res) {
             send(res, service_.questionnaire(req.matches[1], req.body));
           });
  srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/payment)", [&, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.payment(req.matches[1]));
  });
  srv.Get("/fixtures/profiles", [&, send](const httplib::Request&, httplib::Response& res) {
    send(res, service_.profiles());
  });
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  srv.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error(500, what));
  });
  srv.set_error_handler([send](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    send(res, error(res.status, res.status == 404 ? "no route " + req.method + " " + req.path : "request failed"));
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = server_->bind_to_any_port(host);
    if (p < 0) throw Error("cannot bind " + host);
    return p;
  }
  if (!server_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

}  // namespace cakecut::service
