#include "glf/server.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace glf {

using nlohmann::json;

namespace {

struct HttpError {
  int status;
  std::string name;
  std::string detail;
};

Reply error_reply(int status, const std::string& name, const std::string& detail) {
  return Reply{status, json{{"error", name}, {"detail", detail}}.dump()};
}

Reply ok(const json& j) { return Reply{200, j.dump()}; }

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw HttpError{400, "BadRequest", std::string("malformed JSON: ") + e.what()};
  }
  if (!j.is_object()) throw HttpError{400, "BadRequest", "request body must be a JSON object"};
  return j;
}

std::string now_iso() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string new_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << rng();
  return os.str();
}

// Runs `f`, mapping failures to replies.
template <class F>
Reply guarded(F&& f) {
  try {
    return f();
  } catch (const HttpError& e) {
    return error_reply(e.status, e.name, e.detail);
  } catch (const Error& e) {
    return error_reply(422, std::string(e.name()), e.detail());
  } catch (const json::exception& e) {
    return error_reply(400, "BadRequest", e.what());
  }
}

}  // namespace

struct SessionService::Session {
  std::string id;
  std::string owner;
  std::string system;
  std::string goal;  // S-expression
  std::string created_at;
  std::string updated_at;
  long version = 0;
  json events = json::array();
  std::shared_ptr<const DeductiveSystem> sys;
  std::unique_ptr<Proof> proof;
  std::mutex mu;

  json view() const {
    return json{{"sessionId", id},  {"version", version},       {"system", system},
                {"owner", owner},   {"createdAt", created_at},  {"updatedAt", updated_at},
                {"state", proof->snapshot()}};
  }
};

SessionService::SessionService(std::shared_ptr<const Registry> registry, std::filesystem::path data_dir)
    : registry_(std::move(registry)), data_dir_(std::move(data_dir)) {
  if (!data_dir_.empty()) {
    std::filesystem::create_directories(data_dir_ / "sessions");
    restore();
  }
}

SessionService::~SessionService() = default;

std::size_t SessionService::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw HttpError{404, "UnknownSession", "no session " + id};
  return it->second;
}

namespace {

void check_owner(const std::string& user, const std::string& owner) {
  if (user != owner) throw HttpError{403, "Forbidden", "session belongs to another user"};
}

void check_version(const json& body, long version) {
  if (!body.contains("version") || body["version"].is_null()) return;
  if (!body["version"].is_number_integer()) throw HttpError{400, "BadRequest", "version must be an integer"};
  long v = body["version"].get<long>();
  if (v != version)
    throw HttpError{409, "StaleVersion",
                    "request is for version " + std::to_string(v) + ", session is at " + std::to_string(version)};
}

Tactic tactic_from(const DeductiveSystem& sys, const std::string& text, bool& named) {
  named = sys.find_strategy(text) != nullptr;
  if (named) return *sys.find_strategy(text);
  return Tactic::parse(text, [&](const std::string& n) -> std::optional<Tactic> {
    if (const Tactic* t = sys.find_strategy(n)) return *t;
    return std::nullopt;
  });
}

// Replays one logged operation.  Events recorded as failed are expected to
// fail again; they are kept because even a failed attempt may consume graph
// ids, and replay must reproduce those exactly.
void replay_event(const DeductiveSystem& sys, Proof& p, const json& ev) {
  const std::string op = ev.at("op").get<std::string>();
  const bool failed = ev.value("failed", false);
  try {
    if (op == "apply") {
      p.apply(ev.at("rule").get<std::string>(), Assignment::from_json(ev.at("assignment"), sys.table));
    } else if (op == "undo") {
      p.undo();
    } else if (op == "tactic") {
      bool named = false;
      Tactic t = tactic_from(sys, ev.at("tactic").get<std::string>(), named);
      RunOptions opts;
      opts.fuel = ev.at("fuel").get<std::size_t>();
      opts.require_complete = ev.at("requireComplete").get<bool>();
      run(t, p, opts);
    } else {
      throw Error(Errc::ImportError, "unknown logged operation " + op);
    }
  } catch (const Error&) {
    if (!failed) throw;
  }
}

}  // namespace

void SessionService::persist(const Session& s) const {
  if (data_dir_.empty()) return;
  json doc{{"id", s.id},         {"owner", s.owner},         {"system", s.system},     {"goal", s.goal},
           {"version", s.version}, {"createdAt", s.created_at}, {"updatedAt", s.updated_at}, {"events", s.events}};
  auto path = data_dir_ / "sessions" / (s.id + ".json");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << doc.dump(1) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

void SessionService::restore() {
  for (const auto& e : std::filesystem::directory_iterator(data_dir_ / "sessions")) {
    if (e.path().extension() != ".json") continue;
    try {
      std::ifstream in(e.path());
      json doc = json::parse(in);
      auto s = std::make_shared<Session>();
      s->id = doc.at("id");
      s->owner = doc.at("owner");
      s->system = doc.at("system");
      s->goal = doc.at("goal");
      s->version = doc.at("version");
      s->created_at = doc.value("createdAt", "");
      s->updated_at = doc.value("updatedAt", "");
      s->events = doc.at("events");
      s->sys = registry_->get(s->system);
      s->proof = Proof::create(s->sys, parse_formula(s->sys->table, s->goal));
      for (const auto& ev : s->events) replay_event(*s->sys, *s->proof, ev);
      sessions_[s->id] = s;
    } catch (const std::exception& ex) {
      std::cerr << "skipping session file " << e.path() << ": " << ex.what() << "\n";
    }
  }
}

Reply SessionService::systems() const {
  return guarded([&] { return ok(registry_->catalog()); });
}

Reply SessionService::create(const std::string& user, const std::string& body) {
  return guarded([&] {
    json b = parse_body(body);
    if (!b.contains("system") || !b["system"].is_string()) throw HttpError{400, "BadRequest", "system is required"};
    if (!b.contains("goal") || !b["goal"].is_string()) throw HttpError{400, "BadRequest", "goal is required"};
    auto s = std::make_shared<Session>();
    s->sys = registry_->get(b["system"].get<std::string>());
    Formula goal = parse_formula(s->sys->table, b["goal"].get<std::string>());
    s->id = new_id();
    s->owner = user;
    s->system = s->sys->name;
    s->goal = to_sexpr(goal);
    s->created_at = s->updated_at = now_iso();
    s->proof = Proof::create(s->sys, goal);
    persist(*s);
    json out = s->view();
    {
      std::lock_guard lock(mu_);
      sessions_[s->id] = s;
    }
    return ok(out);
  });
}

Reply SessionService::get(const std::string& user, const std::string& id) {
  return guarded([&] {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    check_owner(user, s->owner);
    return ok(s->view());
  });
}

Reply SessionService::apply(const std::string& user, const std::string& id, const std::string& body) {
  return guarded([&] {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    check_owner(user, s->owner);
    json b = parse_body(body);
    check_version(b, s->version);
    if (!b.contains("rule") || !b["rule"].is_string()) throw HttpError{400, "BadRequest", "rule is required"};
    const std::string rule = b["rule"];
    Assignment a = Assignment::from_json(b, s->sys->table);
    json ev{{"op", "apply"}, {"rule", rule}, {"assignment", a.to_json()}};
    try {
      s->proof->apply(rule, a);
    } catch (const Error&) {
      ev["failed"] = true;
      s->events.push_back(ev);
      persist(*s);
      throw;
    }
    s->events.push_back(ev);
    ++s->version;
    s->updated_at = now_iso();
    persist(*s);
    return ok(s->view());
  });
}

Reply SessionService::applicable(const std::string& user, const std::string& id, const std::string& body) {
  return guarded([&] {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    check_owner(user, s->owner);
    json b = parse_body(body);
    Assignment where = Assignment::from_json(b, s->sys->table);
    const auto& t = s->sys->table;
    json out = json::array();
    for (const auto& r : s->sys->rules) {
      auto cands = s->proof->applicable(*r, {}, where.target);
      json cs = json::array();
      for (const auto& c : cands) {
        json cj = c.to_json();
        if (c.result) cj["resultInfix"] = render(t, *c.result, RenderStyle::Infix);
        cs.push_back(std::move(cj));
      }
      out.push_back({{"rule", r->name},
                     {"description", r->description},
                     {"candidates", cs},
                     {"needsResult", r->conclusion.empty() && !r->axiom && r->style != Style::Backward &&
                                         r->subproof != SubproofAction::OpenStrict}});
    }
    return ok(json{{"version", s->version}, {"rules", out}});
  });
}

Reply SessionService::tactic(const std::string& user, const std::string& id, const std::string& body) {
  return guarded([&] {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    check_owner(user, s->owner);
    json b = parse_body(body);
    check_version(b, s->version);
    if (!b.contains("tactic") || !b["tactic"].is_string()) throw HttpError{400, "BadRequest", "tactic is required"};
    const std::string text = b["tactic"];
    bool named = false;
    Tactic t = tactic_from(*s->sys, text, named);
    RunOptions opts;
    if (b.contains("fuel")) {
      if (!b["fuel"].is_number_integer() || b["fuel"].get<long>() <= 0)
        throw HttpError{400, "BadRequest", "fuel must be a positive integer"};
      opts.fuel = b["fuel"].get<std::size_t>();
    }
    opts.require_complete = b.contains("requireComplete") ? b["requireComplete"].get<bool>() : named;
    json ev{{"op", "tactic"}, {"tactic", text}, {"fuel", opts.fuel}, {"requireComplete", opts.require_complete}};
    TacticOutcome outcome;
    try {
      outcome = run(t, *s->proof, opts);
    } catch (const Error&) {
      ev["failed"] = true;
      s->events.push_back(ev);
      persist(*s);
      throw;
    }
    s->events.push_back(ev);
    if (outcome.success() && !outcome.trace.empty()) {
      ++s->version;
      s->updated_at = now_iso();
    }
    persist(*s);
    json out = s->view();
    out["outcome"] = outcome.to_json();
    return ok(out);
  });
}

Reply SessionService::undo(const std::string& user, const std::string& id, const std::string& body) {
  return guarded([&] {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    check_owner(user, s->owner);
    json b = parse_body(body);
    check_version(b, s->version);
    s->proof->undo();
    s->events.push_back(json{{"op", "undo"}});
    ++s->version;
    s->updated_at = now_iso();
    persist(*s);
    return ok(s->view());
  });
}

Reply SessionService::export_document(const std::string& user, const std::string& id) {
  return guarded([&] {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    check_owner(user, s->owner);
    return ok(s->proof->to_document());
  });
}

// ---------------------------------------------------------------------------
// HTTP

Server::Server(std::shared_ptr<const Registry> registry, const ServerConfig& cfg)
    : cfg_(cfg),
      service_(std::make_unique<SessionService>(std::move(registry), cfg.data_dir)),
      http_(std::make_unique<httplib::Server>()) {
  if (!cfg_.users_file.empty()) {
    std::ifstream in(cfg_.users_file);
    if (!in) throw Error(Errc::InvalidSystem, "cannot read users file " + cfg_.users_file);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string token, user;
      if (!(ls >> token) || token.starts_with("#")) continue;
      if (!(ls >> user)) user = token;
      tokens_[token] = user;
    }
  }

  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  // Wraps a handler with authentication.
  auto authed = [this, send](auto handler) {
    return [this, send, handler](const httplib::Request& req, httplib::Response& res) {
      auto user = authenticate(req.get_header_value("Authorization"));
      if (!user) {
        send(res, error_reply(401, "Unauthorized", "missing or unknown bearer token"));
        return;
      }
      send(res, handler(*user, req));
    };
  };

  http_->Get("/api/v1/systems", authed([this](const std::string&, const httplib::Request&) { return service_->systems(); }));
  http_->Post("/api/v1/sessions", authed([this](const std::string& u, const httplib::Request& req) {
                return service_->create(u, req.body);
              }));
  http_->Get(R"(/api/v1/sessions/([0-9a-zA-Z_-]+))", authed([this](const std::string& u, const httplib::Request& req) {
               return service_->get(u, req.matches[1]);
             }));
  http_->Get(R"(/api/v1/sessions/([0-9a-zA-Z_-]+)/export)",
             authed([this](const std::string& u, const httplib::Request& req) {
               return service_->export_document(u, req.matches[1]);
             }));
  http_->Post(R"(/api/v1/sessions/([0-9a-zA-Z_-]+)/apply)",
              authed([this](const std::string& u, const httplib::Request& req) {
                return service_->apply(u, req.matches[1], req.body);
              }));
  http_->Post(R"(/api/v1/sessions/([0-9a-zA-Z_-]+)/applicable)",
              authed([this](const std::string& u, const httplib::Request& req) {
                return service_->applicable(u, req.matches[1], req.body);
              }));
  http_->Post(R"(/api/v1/sessions/([0-9a-zA-Z_-]+)/tactic)",
              authed([this](const std::string& u, const httplib::Request& req) {
                return service_->tactic(u, req.matches[1], req.body);
              }));
  http_->Post(R"(/api/v1/sessions/([0-9a-zA-Z_-]+)/undo)",
              authed([this](const std::string& u, const httplib::Request& req) {
                return service_->undo(u, req.matches[1], req.body);
              }));
  http_->set_error_handler([send](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send(res, error_reply(res.status, "NotFound", "no such endpoint"));
  });
}

Server::~Server() { stop(); }

std::optional<std::string> Server::authenticate(const std::string& header) const {
  if (tokens_.empty()) return std::string("anonymous");
  const std::string prefix = "Bearer ";
  if (!header.starts_with(prefix)) return std::nullopt;
  auto it = tokens_.find(header.substr(prefix.size()));
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

bool Server::listen() { return http_->listen(cfg_.host, cfg_.port); }

int Server::start_background() {
  int port = http_->bind_to_any_port(cfg_.host);
  thread_ = std::make_unique<std::thread>([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port;
}

void Server::stop() {
  if (http_) http_->stop();
  if (thread_ && thread_->joinable()) thread_->join();
  thread_.reset();
}

}  // namespace glf
