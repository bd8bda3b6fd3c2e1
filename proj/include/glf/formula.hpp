#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "glf/error.hpp"
#include "glf/graphstore.hpp"

namespace glf {

struct Operator {
  std::string symbol;
  int arity = 1;
  bool infix = false;
  std::string display;  // glyph for infix rendering; defaults to symbol
};

class OperatorTable {
 public:
  OperatorTable() = default;
  explicit OperatorTable(std::vector<Operator> ops);

  // Throws InvalidSystem on a duplicate symbol, a non-positive arity or a
  // symbol containing whitespace or parentheses.
  void add(Operator op);
  const Operator* find(std::string_view symbol) const;
  const std::vector<Operator>& operators() const { return ops_; }
  bool empty() const { return ops_.empty(); }

  static bool valid_atom_name(std::string_view name);

 private:
  std::vector<Operator> ops_;
};

// Immutable propositional formula.  Copies share structure; equality and
// ordering are structural.  A default-constructed Formula is empty and only
// useful as a placeholder.
class Formula {
 public:
  Formula() = default;

  static Formula atom(std::string name);
  static Formula compound(std::string op, std::vector<Formula> operands);

  explicit operator bool() const { return node_ != nullptr; }
  bool is_atom() const;
  // Atom name or principal operator.
  const std::string& symbol() const;
  std::span<const Formula> operands() const;
  // 1-based, matching the operand numbering used by rules.
  const Formula& operand(std::size_t index) const;
  std::size_t arity() const { return operands().size(); }
  std::size_t size() const;
  std::size_t hash() const;

  friend bool operator==(const Formula& a, const Formula& b);
  // Smaller formulas first, then atoms before compounds, then by symbol and
  // operands.  Gives enumerations a small-first deterministic order.
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

using FormulaSet = std::set<Formula>;

Formula parse_formula(const OperatorTable& table, std::string_view text);

enum class RenderStyle { Sexpr, Infix };
std::string render(const OperatorTable& table, const Formula& f, RenderStyle style = RenderStyle::Sexpr);
// Table-free S-expression rendering.
std::string to_sexpr(const Formula& f);

// Reflexive-transitive operand closure.
FormulaSet subformulas(const Formula& f);
bool is_subformula(const Formula& sub, const Formula& f);

// Graph vocabulary for formula vertices.
namespace schema {
inline constexpr const char* kFormula = "Formula";
inline constexpr const char* kOperandEdge = "Operand";
inline constexpr const char* kOperandKey = "operand";
inline constexpr const char* kOpKey = "op";
inline constexpr const char* kAtomKey = "atom";
}  // namespace schema

// Interns formulas into a property graph, one vertex per distinct formula,
// with an operand edge from each operand vertex into its compound.  The graph
// is authoritative: the store only caches lookups and revalidates entries
// whose vertex has been rolled back.
class FormulaStore {
 public:
  graph::VertexId intern(graph::PropertyGraph& g, const Formula& f);
  std::optional<graph::VertexId> find(const graph::PropertyGraph& g, const Formula& f) const;
  // Decodes the formula rooted at a formula vertex.  Throws ImportError if
  // the vertex is not a well-formed formula vertex.
  Formula formula_at(const graph::PropertyGraph& g, graph::VertexId v) const;

 private:
  Formula decode(const graph::PropertyGraph& g, graph::VertexId v, std::set<graph::VertexId>& visiting) const;
  std::optional<graph::VertexId> lookup_graph(const graph::PropertyGraph& g, const Formula& f) const;

  mutable std::unordered_map<Formula, graph::VertexId, FormulaHash> ids_;
  mutable std::unordered_map<std::uint64_t, Formula> formulas_;
};

}  // namespace glf
