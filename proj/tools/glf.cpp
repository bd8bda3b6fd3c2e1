// glf: serve proof sessions over HTTP, check proof documents, run strategies.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "glf/server.hpp"
#include "glf/systems.hpp"

namespace {

glf::Registry load_registry(const std::string& dir) {
  if (dir.empty()) return glf::Registry::builtin();
  glf::Registry r;
  r.load_directory(dir);
  return r;
}

int check(const glf::Registry& reg, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 2;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  if (!doc.contains("system") || !doc["system"].is_string()) {
    std::cerr << path << ": no system named in the document\n";
    return 2;
  }
  auto proof = glf::Proof::import(reg.get(doc["system"].get<std::string>()), doc);
  auto problems = proof->verify();
  auto report = proof->check();
  for (const auto& p : problems) std::cout << "invalid: " << p << "\n";
  std::cout << report.summary() << "\n";
  if (!problems.empty()) return 1;
  return report.complete ? 0 : 1;
}

int prove(const glf::Registry& reg, const std::string& system, const std::string& goal, const std::string& strategy,
          const std::string& tactic, std::size_t fuel, const std::string& export_path) {
  auto sys = reg.get(system);
  glf::Formula g = glf::parse_formula(sys->table, goal);
  glf::ProveResult res;
  if (!tactic.empty()) {
    auto t = glf::Tactic::parse(tactic, [&](const std::string& n) -> std::optional<glf::Tactic> {
      if (const glf::Tactic* found = sys->find_strategy(n)) return *found;
      return std::nullopt;
    });
    res.proof = glf::Proof::create(sys, g);
    res.outcome = glf::run(t, *res.proof, {fuel, true});
  } else {
    res = glf::prove_with_strategy(sys, g, strategy.empty() ? sys->default_strategy : strategy, fuel);
  }
  std::cout << glf::outcome_name(res.outcome.status) << " after " << res.outcome.applications << " applications\n";
  if (res.outcome.success()) {
    for (const auto& s : res.outcome.trace) std::cout << "  " << s.rule << " " << s.assignment.to_json().dump() << "\n";
    if (std::getenv("GLF_SHOW")) std::cout << res.proof->snapshot().dump(1) << "\n";
    if (!export_path.empty()) {
      std::ofstream out(export_path);
      out << res.proof->to_document().dump(2) << "\n";
    }
    return 0;
  }
  std::cout << res.outcome.reason << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based logical framework"};
  app.require_subcommand(1);
  std::string systems_dir;
  app.add_option("--systems-dir", systems_dir, "Directory of .glf system files (default: built-in systems)")
      ->envname("GLF_SYSTEMS_DIR");

  auto* serve = app.add_subcommand("serve", "Run the HTTP proof-session service");
  glf::ServerConfig cfg;
  serve->add_option("--host", cfg.host)->envname("GLF_HOST");
  serve->add_option("--port", cfg.port)->envname("GLF_PORT");
  serve->add_option("--systems-dir", systems_dir)->envname("GLF_SYSTEMS_DIR");
  serve->add_option("--data-dir", cfg.data_dir, "Where sessions are persisted")->envname("GLF_DATA_DIR");
  serve->add_option("--users", cfg.users_file, "Token file; each line: <token> <user>")->envname("GLF_USERS");

  auto* chk = app.add_subcommand("check", "Check a proof document; exit status 0 only for complete valid proofs");
  std::string doc_path;
  chk->add_option("document", doc_path)->required()->envname("GLF_DOCUMENT");
  chk->add_option("--systems-dir", systems_dir)->envname("GLF_SYSTEMS_DIR");

  auto* prv = app.add_subcommand("prove", "Run a strategy on a goal");
  std::string system, goal, strategy, export_path;
  std::size_t fuel = glf::kDefaultFuel;
  prv->add_option("--system", system)->required()->envname("GLF_SYSTEM");
  prv->add_option("--goal", goal, "Goal as an S-expression")->required()->envname("GLF_GOAL");
  prv->add_option("--strategy", strategy, "Strategy name (default: the system's default)")->envname("GLF_STRATEGY");
  std::string tactic;
  prv->add_option("--tactic", tactic, "Tactic text to run instead of a named strategy")->envname("GLF_TACTIC");
  prv->add_option("--fuel", fuel)->envname("GLF_FUEL")->check(CLI::PositiveNumber);
  prv->add_option("--export", export_path, "Write the proof document here on success")->envname("GLF_EXPORT");
  prv->add_option("--systems-dir", systems_dir)->envname("GLF_SYSTEMS_DIR");

  CLI11_PARSE(app, argc, argv);

  try {
    auto reg = std::make_shared<glf::Registry>(load_registry(systems_dir));
    if (*serve) {
      glf::Server server(reg, cfg);
      std::cout << "listening on " << cfg.host << ":" << cfg.port << "\n" << std::flush;
      return server.listen() ? 0 : 1;
    }
    if (*chk) return check(*reg, doc_path);
    return prove(*reg, system, goal, strategy, tactic, fuel, export_path);
  } catch (const glf::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
