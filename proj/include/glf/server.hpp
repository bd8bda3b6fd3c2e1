#pragma once

// HTTP proof-session service.
//
//   POST /api/v1/sessions                   {system, goal}
//   GET  /api/v1/systems
//   GET  /api/v1/sessions/{id}
//   POST /api/v1/sessions/{id}/apply        {rule, target?, args?, resultFormula?, version?}
//   POST /api/v1/sessions/{id}/applicable   {target?}
//   POST /api/v1/sessions/{id}/tactic       {tactic, fuel?, requireComplete?, version?}
//   POST /api/v1/sessions/{id}/undo         {version?}
//   GET  /api/v1/sessions/{id}/export
//
// Errors are {"error": <name>, "detail": <text>}: 400 malformed request,
// 401/403 authentication, 404 unknown session, 409 stale version, 422 any
// engine error.  Sessions are kept as a log of operations and replayed on
// restart, which rebuilds identical graphs including ids.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "glf/systems.hpp"

namespace httplib {
class Server;
}

namespace glf {

struct Reply {
  int status = 200;
  std::string body;  // JSON text
};

class SessionService {
 public:
  // An empty data_dir keeps sessions in memory only.
  explicit SessionService(std::shared_ptr<const Registry> registry, std::filesystem::path data_dir = {});
  ~SessionService();

  Reply systems() const;
  Reply create(const std::string& user, const std::string& body);
  Reply get(const std::string& user, const std::string& id);
  Reply apply(const std::string& user, const std::string& id, const std::string& body);
  Reply applicable(const std::string& user, const std::string& id, const std::string& body);
  Reply tactic(const std::string& user, const std::string& id, const std::string& body);
  Reply undo(const std::string& user, const std::string& id, const std::string& body);
  Reply export_document(const std::string& user, const std::string& id);

  std::size_t session_count() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  void persist(const Session& s) const;
  void restore();

  std::shared_ptr<const Registry> registry_;
  std::filesystem::path data_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;
  std::string users_file;  // lines "<token> <user>"; empty disables authentication
};

class Server {
 public:
  Server(std::shared_ptr<const Registry> registry, const ServerConfig& cfg);
  ~Server();

  // Blocks until stop().
  bool listen();
  // Binds an ephemeral port and serves on a background thread; returns the port.
  int start_background();
  void stop();

  SessionService& service() { return *service_; }

 private:
  std::optional<std::string> authenticate(const std::string& header) const;

  ServerConfig cfg_;
  std::unique_ptr<SessionService> service_;
  std::map<std::string, std::string> tokens_;
  std::unique_ptr<httplib::Server> http_;
  std::unique_ptr<std::thread> thread_;
};

}  // namespace glf
