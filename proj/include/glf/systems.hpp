#pragma once

// Deductive systems and their registry.
//
// Systems are declared in authoring files:
//
//   System(name="nd-minimal", style=backward, description="...")
//   Include("nd-minimal")                     -- reuse another system's rules
//   Operator(symbol="->", arity=2, infix=true, display="→")
//   Example("(-> A A)")
//   "impI" =: Rule(args=[...], branches=[...])
//   "K1" =: Axiom("(-> a (-> b a))")
//   Strategy("auto", Many(Atomic(impI)))
//
// Included rules are resolved when a system is looked up, so replacing a
// system changes every system that includes it.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glf/engine.hpp"
#include "glf/tactics.hpp"

namespace glf {

struct DeductiveSystem : Calculus {
  std::string description;
  std::vector<std::string> includes;
  std::vector<std::string> examples;
  std::vector<std::pair<std::string, Tactic>> strategies;
  std::string default_strategy = "auto";

  const Tactic* find_strategy(std::string_view name) const;
  // Throws UnknownStrategy.
  const Tactic& strategy(std::string_view name) const;
  nlohmann::json describe(bool with_rules = true) const;
};

// Parses every System(...) declaration in `source`.  Included systems are
// only named here; the registry resolves them.
std::vector<DeductiveSystem> parse_systems(std::string_view source);

class Registry {
 public:
  // Throws DuplicateName, UnknownSystem for a missing include, or
  // InvalidSystem when a rule or strategy does not check.
  void add(DeductiveSystem sys);
  // Replaces an existing system; systems including it see the new rules.
  void replace(DeductiveSystem sys);
  // Adds every system declared in the source text.
  void load(std::string_view source);
  // Loads every *.glf file in the directory, in name order.
  void load_directory(const std::filesystem::path& dir);

  std::vector<std::string> names() const;
  bool contains(std::string_view name) const;
  // Fully resolved system.  Throws UnknownSystem.
  std::shared_ptr<const DeductiveSystem> get(std::string_view name) const;
  nlohmann::json catalog() const;

  // Registry holding the built-in systems.
  static Registry builtin();

 private:
  std::shared_ptr<const DeductiveSystem> resolve(const std::string& name, std::vector<std::string>& stack) const;
  void check(const std::string& name) const;

  std::map<std::string, std::shared_ptr<const DeductiveSystem>, std::less<>> declared_;
  std::vector<std::string> order_;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  mutable std::map<std::string, std::shared_ptr<const DeductiveSystem>, std::less<>> cache_;
};

// Source text of the built-in authoring files, keyed by file name.
const std::vector<std::pair<std::string, std::string>>& builtin_sources();

struct ProveResult {
  TacticOutcome outcome;
  std::unique_ptr<Proof> proof;
};

// Runs the named strategy on a fresh proof of `goal`; success requires a
// complete proof.  Throws UnknownStrategy.
ProveResult prove_with_strategy(std::shared_ptr<const DeductiveSystem> sys, const Formula& goal,
                                std::string_view strategy, std::size_t fuel = kDefaultFuel);

}  // namespace glf
