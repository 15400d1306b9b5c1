#pragma once

// Session service behind the HTTP API. Handlers take and return JSON so they
// can be exercised without a socket; HttpServer binds them to routes.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "cakecut/experiment.hpp"
#include "cakecut/io.hpp"

namespace httplib {
class Server;
}

namespace cakecut::service {

struct ServiceOptions {
  std::optional<std::filesystem::path> trace_dir;  // sessions persist and recover here
  bool enforce_time_limit = true;                   // default for sessions that do not say
  experiment::Session::Clock clock;                 // defaults to a steady clock
};

struct Response {
  int status = 200;
  io::Json body;
};

/// Short per-procedure instructions shown to subjects.
std::string instructions(const Procedure& procedure);

/// What a subject may see. Opponent valuations appear only once revealed.
io::Json session_view(const experiment::Session& session);

class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {});

  Response create(const std::string& body);
  Response get(const std::string& id);
  Response act(const std::string& id, const std::string& body);
  Response questionnaire(const std::string& id, const std::string& body);
  Response payment(const std::string& id);
  Response profiles() const;

  [[nodiscard]] std::size_t size() const;

 private:
  struct Entry {
    std::mutex mutex;  // serializes actions on one session
    std::unique_ptr<experiment::Session> session;
  };
  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string fresh_id();

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
};

/// Structured error body: {"error": {"status": 400, "message": "..."}}.
Response error(int status, const std::string& message);

/// HTTP binding of a SessionService.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  /// Binds and returns the port (pass 0 for any free port). Throws Error
  /// when the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called from another thread.
  void listen();
  void stop();

 private:
  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace cakecut::service
