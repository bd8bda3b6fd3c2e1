#pragma once

// Small HTTP client for the session service, and the worked script driven
// through it.

#include <stdexcept>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "glf/server.hpp"
#include "worked.hpp"

namespace api {

using nlohmann::json;

struct Res {
  int status = 0;
  std::string body;
  json j() const { return json::parse(body); }
};

struct Client {
  httplib::Client cli;
  std::string token;

  explicit Client(int port, std::string tok = {}) : cli("127.0.0.1", port), token(std::move(tok)) {
    cli.set_read_timeout(60, 0);
  }

  httplib::Headers headers() const {
    if (token.empty()) return {};
    return {{"Authorization", "Bearer " + token}};
  }
  Res get(const std::string& path) {
    auto r = cli.Get(path, headers());
    if (!r) throw std::runtime_error("GET " + path + " failed");
    return {r->status, r->body};
  }
  Res post_raw(const std::string& path, const std::string& body) {
    auto r = cli.Post(path, headers(), body, "application/json");
    if (!r) throw std::runtime_error("POST " + path + " failed");
    return {r->status, r->body};
  }
  Res post(const std::string& path, const json& body) { return post_raw(path, body.dump()); }

  std::string create(const std::string& system, const std::string& goal) {
    Res r = post("/api/v1/sessions", {{"system", system}, {"goal", goal}});
    if (r.status != 200) throw std::runtime_error("create: " + r.body);
    return r.j()["sessionId"];
  }
  std::string base(const std::string& sid) const { return "/api/v1/sessions/" + sid; }
};

// Plays the worked script: each step asks for the candidates at the focus,
// picks the one matching the script's arguments and posts it back.
inline void play_worked(Client& c, const std::string& sid) {
  for (const auto& step : worked::script()) {
    json state = c.get(c.base(sid)).j();
    long version = state["version"];
    std::string focus = state["state"]["focus"];
    json menu = c.post(c.base(sid) + "/applicable", {{"target", focus}}).j();
    json pick;
    int fits = 0;
    for (const auto& r : menu["rules"]) {
      if (r["rule"] != step.rule) continue;
      for (const auto& cand : r["candidates"]) {
        bool ok = true;
        for (const auto& [k, v] : step.args) ok = ok && cand["args"].contains(k) && cand["args"][k] == v;
        if (ok) {
          pick = cand;
          ++fits;
        }
      }
    }
    if (fits != 1) throw std::runtime_error("step " + step.rule + " has " + std::to_string(fits) + " fits");
    json body{{"rule", step.rule}, {"target", pick["target"]}, {"args", pick["args"]}, {"version", version}};
    if (pick.contains("resultFormula")) body["resultFormula"] = pick["resultFormula"];
    Res r = c.post(c.base(sid) + "/apply", body);
    if (r.status != 200) throw std::runtime_error("apply " + step.rule + ": " + r.body);
  }
}

inline std::string library_worked_export(const glf::Registry& reg) {
  auto sys = reg.get(worked::kSystem);
  auto p = glf::Proof::create(sys, glf::parse_formula(sys->table, worked::kGoal));
  for (const auto& s : worked::script()) worked::apply_step(*p, s);
  return p->to_document().dump();
}

}  // namespace api
