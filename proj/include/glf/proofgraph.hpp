#pragma once

// Proof states.
//
// Backward natural-deduction proofs live in a property graph next to their
// formulas.  Each deduction vertex derives one formula; a rule application
// points at its children through role-labelled premise edges, and an open
// goal is a deduction vertex whose status is still "goal".  Hypotheses are
// attached to the node whose subtree may use them.
//
// Linear (Fitch and Hilbert) proofs are kept as numbered lines with nested
// subproofs and mapped onto the same vertex vocabulary on export.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "glf/formula.hpp"
#include "glf/graphstore.hpp"

namespace glf {

namespace proof_schema {
inline constexpr const char* kDeduction = "Deduction";
inline constexpr const char* kDerives = "Derives";
inline constexpr const char* kPremise = "Premise";
inline constexpr const char* kAssumes = "Assumes";
inline constexpr const char* kStatus = "status";
inline constexpr const char* kRule = "rule";
inline constexpr const char* kLeafKind = "leafKind";
inline constexpr const char* kRole = "role";
inline constexpr const char* kIndex = "index";
inline constexpr const char* kLine = "line";
inline constexpr const char* kDepth = "depth";
}  // namespace proof_schema

enum class NodeStatus { Goal, Leaf, Regular };
std::string_view status_name(NodeStatus s);

struct ProofReport {
  bool complete = false;
  std::size_t open_goals = 0;
  std::vector<std::string> violations;

  std::string summary() const;
};

// Expected premise count for a rule name, or nullopt if unknown.
using PremiseCount = std::function<std::optional<std::size_t>(const std::string& rule)>;

struct NewBranch {
  std::string role;
  Formula goal;
  std::vector<Formula> hypotheses;
};

class ProofState {
 public:
  ProofState(std::string system, OperatorTable table, const Formula& goal);

  const std::string& system() const { return system_; }
  const OperatorTable& table() const { return table_; }
  const graph::PropertyGraph& graph() const { return g_; }
  graph::VertexId root() const { return root_; }
  const Formula& root_goal() const { return goal_; }

  // Goals in depth-first preorder over premise indices; the first one is the
  // focus.
  std::vector<graph::VertexId> open_goals() const;
  std::optional<graph::VertexId> focus() const;
  std::vector<graph::VertexId> deductions() const;

  bool is_deduction(graph::VertexId v) const;
  NodeStatus status(graph::VertexId node) const;
  Formula formula(graph::VertexId node) const;
  std::optional<std::string> rule(graph::VertexId node) const;
  std::vector<std::pair<std::string, graph::VertexId>> premises(graph::VertexId node) const;
  std::optional<graph::VertexId> parent(graph::VertexId node) const;
  // Hypotheses introduced exactly at this node.
  FormulaSet assumed_at(graph::VertexId node) const;
  // Hypotheses visible at this node: those introduced on the path from the root.
  FormulaSet hypotheses(graph::VertexId node) const;
  // Every formula interned in the proof graph.
  const FormulaSet& universe() const;

  // Throws NotAGoal or NotAHypothesis.
  void close_with_hypothesis(graph::VertexId goal);
  // Marks `goal` as an application of `rule` and adds one child goal per
  // branch.  An empty branch list closes the goal.
  std::vector<graph::VertexId> expand(graph::VertexId goal, const std::string& rule,
                                      const std::vector<NewBranch>& branches);

  std::size_t history_size() const { return history_.size(); }
  // Throws NothingToUndo.
  void undo();

  ProofReport check(const PremiseCount& premise_count = {}) const;

  // Graph document plus {"system", "rootGoal"}.
  nlohmann::json to_document() const;
  // Validates every structural invariant; throws ImportError naming the
  // first violation.
  static ProofState from_document(const nlohmann::json& doc, const OperatorTable& table,
                                  const PremiseCount& premise_count = {});

 private:
  ProofState() = default;
  graph::VertexId formula_vertex(graph::VertexId node) const;
  void require_goal(graph::VertexId node) const;

  std::string system_;
  OperatorTable table_;
  Formula goal_;
  graph::PropertyGraph g_;
  FormulaStore store_;
  graph::VertexId root_;
  // Open goals in order, kept up to date by every mutation; each history
  // entry saves the list as it was before.
  std::vector<graph::VertexId> goals_;
  std::vector<std::pair<graph::Savepoint, std::vector<graph::VertexId>>> history_;
  mutable std::uint64_t universe_rev_ = ~std::uint64_t{0};
  mutable FormulaSet universe_;

  // A deduction's formula and hypotheses are fixed when it is created and
  // ids are never reused, so these lookups are kept for good.
  std::vector<graph::VertexId> scan_goals() const;
  Formula decoded(graph::VertexId v) const;
  mutable std::map<graph::VertexId, FormulaSet> hyps_cache_;
  mutable std::map<graph::VertexId, Formula> decoded_;
};

// ---------------------------------------------------------------------------
// Linear proofs

struct Line {
  int index = 0;  // 1-based
  Formula formula;
  std::string rule;
  std::vector<std::pair<std::string, int>> cites;  // (role, line)
  int depth = 0;
  int subproof = 0;
  bool hypothesis = false;
  // Open hypothesis lines this line rests on.
  std::set<int> deps;

  friend bool operator==(const Line&, const Line&) = default;
};

struct Subproof {
  int id = 0;
  int parent = -1;
  bool strict = false;
  int depth = 0;
  std::optional<int> hypothesis;  // line
  std::optional<Formula> aim;     // implication this subproof sets out to prove
  int first_line = 1;             // index the first inner line gets
  bool open = true;

  friend bool operator==(const Subproof&, const Subproof&) = default;
};

class LinearState {
 public:
  LinearState(std::string system, OperatorTable table, const Formula& goal);

  const std::string& system() const { return system_; }
  const OperatorTable& table() const { return table_; }
  const Formula& goal() const { return goal_; }
  const std::vector<Line>& lines() const { return lines_; }
  const Line& line(int index) const;
  bool has_line(int index) const { return index >= 1 && static_cast<std::size_t>(index) <= lines_.size(); }
  const std::vector<Subproof>& subproofs() const { return subproofs_; }
  // Innermost open subproof; 0 is the top level, which never closes.
  int current() const { return open_.back(); }
  const std::vector<int>& open_chain() const { return open_; }
  int depth() const { return static_cast<int>(open_.size()) - 1; }

  // Whether `index` can be cited from the current position, or from `drop`
  // subproofs further out.  Strict subproofs hide everything outside them
  // unless `cross_strict` is set.
  bool citable(int index, bool cross_strict = false, int drop = 0) const;
  // First citable line holding `f`.
  std::optional<int> citable_line_with(const Formula& f, int drop = 0) const;

  // Goal subformulas plus subformulas of every line.
  const FormulaSet& universe() const;

  // What each open context is trying to derive, outermost first; nullopt
  // where the context aims at a contradiction or nothing is known.
  std::vector<std::optional<Formula>> target_chain() const;
  std::optional<Formula> target() const;
  // Known targets, innermost first, without repeats.
  std::vector<Formula> targets() const;

  // Hypothesis lines depend on themselves.
  int append(Line line);
  int open_subproof(bool strict);
  // Records `line` as the hypothesis of the innermost subproof.
  void set_hypothesis(int line, std::optional<Formula> aim = std::nullopt);
  void close_subproof();

  bool complete() const;
  ProofReport check() const;
  graph::PropertyGraph to_graph() const;

  friend bool operator==(const LinearState& a, const LinearState& b) {
    return a.lines_ == b.lines_ && a.subproofs_ == b.subproofs_ && a.open_ == b.open_ && a.goal_ == b.goal_;
  }

 private:
  std::string system_;
  OperatorTable table_;
  Formula goal_;
  std::vector<Line> lines_;
  std::vector<Subproof> subproofs_;
  std::vector<int> open_;
  mutable std::size_t universe_lines_ = ~std::size_t{0};
  mutable FormulaSet universe_;
};

}  // namespace glf
