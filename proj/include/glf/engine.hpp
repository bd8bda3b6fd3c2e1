#pragma once

// Rule application over proof states.  A Proof wraps either a backward
// natural-deduction ProofState or a linear (Fitch / Hilbert) LinearState and
// offers the same interface to tactics and the HTTP layer: enumerate the
// assignments under which a rule applies, apply one, undo.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glf/proofgraph.hpp"
#include "glf/rules.hpp"

namespace glf {

struct Step {
  std::string rule;
  Assignment assignment;
  friend bool operator==(const Step&, const Step&) = default;
};

class Proof {
 public:
  virtual ~Proof() = default;

  static std::unique_ptr<Proof> create(std::shared_ptr<const Calculus> calculus, const Formula& goal);
  // Backward documents are checked node by node against the rules; linear
  // documents are replayed from their recorded steps.  Throws ImportError.
  static std::unique_ptr<Proof> import(std::shared_ptr<const Calculus> calculus, const nlohmann::json& doc);

  const Calculus& calculus() const { return *calc_; }
  const std::shared_ptr<const Calculus>& calculus_ptr() const { return calc_; }
  Style style() const { return calc_->style; }
  virtual const Formula& goal() const = 0;

  // Never mutates.  For backward proofs `target` defaults to the focus.
  virtual std::vector<Assignment> applicable(const Rule& rule, const Enumerator& filter = {},
                                             std::optional<graph::VertexId> target = std::nullopt) const = 0;
  // Throws on any violated precondition, leaving the proof untouched.
  virtual void apply(const Rule& rule, const Assignment& a) = 0;
  void apply(std::string_view rule, const Assignment& a) { apply(calc_->rule(rule), a); }
  // Throws NothingToUndo.
  virtual void undo() = 0;
  virtual std::size_t history_size() const = 0;

  virtual ProofReport check() const = 0;
  // No goals left.  Cheaper than check(), which also validates the graph.
  virtual bool complete() const = 0;
  // Problems with individual steps, e.g. of an imported proof.
  virtual std::vector<std::string> verify() const = 0;

  virtual nlohmann::json to_document() const = 0;
  // Display-oriented view of the current state.
  virtual nlohmann::json snapshot() const = 0;
  virtual std::unique_ptr<Proof> clone() const = 0;
  virtual bool same_state(const Proof& other) const = 0;
  // Compares states up to renaming of graph ids.
  virtual bool same_structure(const Proof& other) const = 0;

  // Applications currently in effect, oldest first.
  const std::vector<Step>& steps() const { return steps_; }

 protected:
  explicit Proof(std::shared_ptr<const Calculus> c) : calc_(std::move(c)) {}
  void check_style(const Rule& rule) const;

  std::shared_ptr<const Calculus> calc_;
  std::vector<Step> steps_;
};

class BackwardProof : public Proof {
 public:
  BackwardProof(std::shared_ptr<const Calculus> calculus, const Formula& goal);
  BackwardProof(std::shared_ptr<const Calculus> calculus, ProofState state);

  const ProofState& state() const { return st_; }
  const Formula& goal() const override { return st_.root_goal(); }

  std::vector<Assignment> applicable(const Rule& rule, const Enumerator& filter = {},
                                     std::optional<graph::VertexId> target = std::nullopt) const override;
  void apply(const Rule& rule, const Assignment& a) override;
  using Proof::apply;
  void undo() override;
  std::size_t history_size() const override { return st_.history_size(); }
  ProofReport check() const override;
  bool complete() const override { return st_.open_goals().empty(); }
  std::vector<std::string> verify() const override;
  nlohmann::json to_document() const override { return st_.to_document(); }
  nlohmann::json snapshot() const override;
  std::unique_ptr<Proof> clone() const override { return std::make_unique<BackwardProof>(*this); }
  bool same_state(const Proof& other) const override;
  bool same_structure(const Proof& other) const override;

 private:
  ProofState st_;
};

class LinearProof : public Proof {
 public:
  LinearProof(std::shared_ptr<const Calculus> calculus, const Formula& goal);

  const LinearState& state() const { return st_; }
  const Formula& goal() const override { return st_.goal(); }

  std::vector<Assignment> applicable(const Rule& rule, const Enumerator& filter = {},
                                     std::optional<graph::VertexId> target = std::nullopt) const override;
  void apply(const Rule& rule, const Assignment& a) override;
  using Proof::apply;
  void undo() override;
  std::size_t history_size() const override { return history_.size(); }
  ProofReport check() const override { return st_.check(); }
  bool complete() const override { return st_.complete(); }
  std::vector<std::string> verify() const override { return st_.check().violations; }
  nlohmann::json to_document() const override;
  nlohmann::json snapshot() const override;
  std::unique_ptr<Proof> clone() const override { return std::make_unique<LinearProof>(*this); }
  bool same_state(const Proof& other) const override;
  bool same_structure(const Proof& other) const override { return same_state(other); }

 private:
  void derive(LinearState& st, const Rule& rule, const Assignment& a) const;
  // Hypotheses worth assuming, each with the implication it aims at when
  // the enclosing subproof has no target of its own.
  std::vector<std::pair<Formula, std::optional<Formula>>> assumption_candidates(const Enumerator& filter) const;

  LinearState st_;
  std::vector<LinearState> history_;
};

// Convenience: the rule names, in declaration order, that have at least one
// assignment at the current focus.
std::vector<std::string> applicable_rules(const Proof& p);

}  // namespace glf
