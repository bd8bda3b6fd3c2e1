#include "glf/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace glf {

// ---------------------------------------------------------------------------
// Operator table

OperatorTable::OperatorTable(std::vector<Operator> ops) {
  for (auto& op : ops) add(std::move(op));
}

void OperatorTable::add(Operator op) {
  if (op.symbol.empty() || op.arity < 1)
    throw Error(Errc::InvalidSystem, "operator '" + op.symbol + "' needs a symbol and arity >= 1");
  for (char c : op.symbol) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')')
      throw Error(Errc::InvalidSystem, "operator symbol '" + op.symbol + "' contains a delimiter");
  }
  if (find(op.symbol)) throw Error(Errc::InvalidSystem, "operator '" + op.symbol + "' declared twice");
  if (op.display.empty()) op.display = op.symbol;
  ops_.push_back(std::move(op));
}

const Operator* OperatorTable::find(std::string_view symbol) const {
  for (const auto& op : ops_)
    if (op.symbol == symbol) return &op;
  return nullptr;
}

bool OperatorTable::valid_atom_name(std::string_view name) {
  return !name.empty() &&
         std::all_of(name.begin(), name.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  bool atom = true;
  std::string symbol;
  std::vector<Formula> operands;
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {
std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }
}  // namespace

Formula Formula::atom(std::string name) {
  auto n = std::make_shared<Node>();
  n->atom = true;
  n->hash = mix(0x51ed27, std::hash<std::string>{}(name));
  n->symbol = std::move(name);
  return Formula(std::move(n));
}

Formula Formula::compound(std::string op, std::vector<Formula> operands) {
  auto n = std::make_shared<Node>();
  n->atom = false;
  std::size_t h = mix(0xc0ffee, std::hash<std::string>{}(op));
  std::size_t size = 1;
  for (const auto& o : operands) {
    h = mix(h, o.hash());
    size += o.size();
  }
  n->symbol = std::move(op);
  n->operands = std::move(operands);
  n->hash = h;
  n->size = size;
  return Formula(std::move(n));
}

bool Formula::is_atom() const { return node_->atom; }
const std::string& Formula::symbol() const { return node_->symbol; }
std::span<const Formula> Formula::operands() const { return node_->operands; }
std::size_t Formula::size() const { return node_->size; }
std::size_t Formula::hash() const { return node_ ? node_->hash : 0; }

const Formula& Formula::operand(std::size_t index) const {
  if (index < 1 || index > node_->operands.size())
    throw Error(Errc::InvalidRef, "operand " + std::to_string(index) + " out of range");
  return node_->operands[index - 1];
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->hash != b.node_->hash || a.node_->size != b.node_->size) return false;
  if (a.node_->atom != b.node_->atom || a.node_->symbol != b.node_->symbol) return false;
  return a.node_->operands == b.node_->operands;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (!a.node_) return std::strong_ordering::less;
  if (!b.node_) return std::strong_ordering::greater;
  if (auto c = a.node_->size <=> b.node_->size; c != 0) return c;
  if (auto c = b.node_->atom <=> a.node_->atom; c != 0) return c;
  if (auto c = a.node_->symbol <=> b.node_->symbol; c != 0) return c;
  const auto& x = a.node_->operands;
  const auto& y = b.node_->operands;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (auto c = x[i] <=> y[i]; c != 0) return c;
  }
  return x.size() <=> y.size();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class SexprParser {
 public:
  SexprParser(const OperatorTable& table, std::string_view text) : table_(table), text_(text) {}

  Formula parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty input");
    Formula f = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::SyntaxError, what + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view token() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Formula expr() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unbalanced parentheses: input ended early");
    if (text_[pos_] == ')') fail("unexpected ')'");
    if (text_[pos_] != '(') {
      std::size_t at = pos_;
      std::string_view name = token();
      if (table_.find(name)) {
        pos_ = at;
        fail("operator '" + std::string(name) + "' used as an atom");
      }
      if (!OperatorTable::valid_atom_name(name)) {
        pos_ = at;
        fail("invalid atom '" + std::string(name) + "'");
      }
      return Formula::atom(std::string(name));
    }
    ++pos_;
    skip_ws();
    std::string_view sym = token();
    if (sym.empty()) fail("expected an operator after '('");
    const Operator* op = table_.find(sym);
    if (!op) throw Error(Errc::UnknownOperator, "unknown operator '" + std::string(sym) + "'");
    std::vector<Formula> operands;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) fail("unbalanced parentheses: missing ')'");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      operands.push_back(expr());
    }
    if (static_cast<int>(operands.size()) != op->arity) {
      throw Error(Errc::ArityError, "operator '" + op->symbol + "' expects " + std::to_string(op->arity) +
                                        " operands, got " + std::to_string(operands.size()));
    }
    return Formula::compound(op->symbol, std::move(operands));
  }

  const OperatorTable& table_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(const OperatorTable& table, std::string_view text) {
  return SexprParser(table, text).parse();
}

std::string to_sexpr(const Formula& f) {
  if (f.is_atom()) return f.symbol();
  std::string out = "(" + f.symbol();
  for (const auto& o : f.operands()) out += " " + to_sexpr(o);
  return out + ")";
}

std::string render(const OperatorTable& table, const Formula& f, RenderStyle style) {
  if (style == RenderStyle::Sexpr) return to_sexpr(f);
  if (f.is_atom()) return f.symbol();
  const Operator* op = table.find(f.symbol());
  std::string glyph = op ? op->display : f.symbol();
  auto ops = f.operands();
  if (ops.size() == 1) {
    std::string inner = render(table, ops[0], style);
    return glyph + inner;
  }
  if (ops.size() == 2 && (!op || op->infix)) {
    return "(" + render(table, ops[0], style) + " " + glyph + " " + render(table, ops[1], style) + ")";
  }
  std::string out = glyph + "(";
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i) out += ", ";
    out += render(table, ops[i], style);
  }
  return out + ")";
}

FormulaSet subformulas(const Formula& f) {
  FormulaSet out;
  std::vector<Formula> todo{f};
  while (!todo.empty()) {
    Formula g = std::move(todo.back());
    todo.pop_back();
    if (!out.insert(g).second) continue;
    for (const auto& o : g.operands()) todo.push_back(o);
  }
  return out;
}

bool is_subformula(const Formula& sub, const Formula& f) {
  if (sub == f) return true;
  if (sub.size() >= f.size()) return false;
  for (const auto& o : f.operands())
    if (is_subformula(sub, o)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// FormulaStore

using graph::PropertyGraph;
using graph::VertexId;

std::optional<VertexId> FormulaStore::lookup_graph(const PropertyGraph& g, const Formula& f) const {
  if (f.is_atom()) {
    graph::GraphPattern p;
    p.nodes.push_back({"f", {schema::kFormula}, {{schema::kAtomKey, graph::Cmp::Eq, f.symbol()}}, std::nullopt});
    auto found = graph::match(g, p);
    if (found.empty()) return std::nullopt;
    return found.front().vertices.front().second;
  }
  std::vector<VertexId> operand_ids;
  for (const auto& o : f.operands()) {
    auto id = find(g, o);
    if (!id) return std::nullopt;
    operand_ids.push_back(*id);
  }
  // Candidates: compounds fed by the first operand in position 1.
  for (graph::EdgeId e : g.out_edges(operand_ids.front())) {
    const auto& edge = g.edge(e);
    if (!edge.labels.contains(schema::kOperandEdge)) continue;
    const graph::Value* idx = g.property(e, schema::kOperandKey);
    if (!idx || !idx->is_int() || idx->integer() != 1) continue;
    VertexId cand = edge.dst;
    const graph::Value* op = g.property(cand, schema::kOpKey);
    if (!op || !op->is_text() || op->text() != f.symbol()) continue;
    std::vector<std::optional<VertexId>> fed(operand_ids.size());
    bool ok = true;
    std::size_t incoming = 0;
    for (graph::EdgeId in : g.in_edges(cand)) {
      const auto& ie = g.edge(in);
      if (!ie.labels.contains(schema::kOperandEdge)) continue;
      const graph::Value* k = g.property(in, schema::kOperandKey);
      ++incoming;
      if (!k || !k->is_int() || k->integer() < 1 || static_cast<std::size_t>(k->integer()) > fed.size()) {
        ok = false;
        break;
      }
      fed[static_cast<std::size_t>(k->integer()) - 1] = ie.src;
    }
    if (!ok || incoming != operand_ids.size()) continue;
    for (std::size_t i = 0; i < fed.size(); ++i) ok = ok && fed[i] == operand_ids[i];
    if (ok) return cand;
  }
  return std::nullopt;
}

std::optional<VertexId> FormulaStore::find(const PropertyGraph& g, const Formula& f) const {
  if (auto it = ids_.find(f); it != ids_.end()) {
    if (g.has_vertex(it->second)) return it->second;
    formulas_.erase(it->second.value);
    ids_.erase(it);
  }
  auto id = lookup_graph(g, f);
  if (id) {
    ids_[f] = *id;
    formulas_[id->value] = f;
  }
  return id;
}

VertexId FormulaStore::intern(PropertyGraph& g, const Formula& f) {
  if (auto id = find(g, f)) return *id;
  VertexId v;
  if (f.is_atom()) {
    v = g.add_vertex({schema::kFormula}, {{schema::kAtomKey, f.symbol()}});
  } else {
    std::vector<VertexId> operand_ids;
    for (const auto& o : f.operands()) operand_ids.push_back(intern(g, o));
    v = g.add_vertex({schema::kFormula}, {{schema::kOpKey, f.symbol()}});
    for (std::size_t i = 0; i < operand_ids.size(); ++i) {
      g.add_edge(operand_ids[i], v, {schema::kOperandEdge},
                 {{schema::kOperandKey, static_cast<std::int64_t>(i + 1)}});
    }
  }
  ids_[f] = v;
  formulas_[v.value] = f;
  return v;
}

Formula FormulaStore::formula_at(const PropertyGraph& g, VertexId v) const {
  std::set<VertexId> visiting;
  return decode(g, v, visiting);
}

Formula FormulaStore::decode(const PropertyGraph& g, VertexId v, std::set<VertexId>& visiting) const {
  if (auto it = formulas_.find(v.value); it != formulas_.end() && g.has_vertex(v)) return it->second;
  if (!g.has_vertex(v)) throw Error(Errc::ImportError, "no formula vertex " + std::to_string(v.value));
  const auto& vx = g.vertex(v);
  if (!vx.labels.contains(schema::kFormula))
    throw Error(Errc::ImportError, "vertex " + std::to_string(v.value) + " is not a formula");
  Formula f;
  if (const graph::Value* atom = g.property(v, schema::kAtomKey)) {
    if (!atom->is_text() || !OperatorTable::valid_atom_name(atom->text()))
      throw Error(Errc::ImportError, "bad atom on vertex " + std::to_string(v.value));
    for (graph::EdgeId in : g.in_edges(v)) {
      if (g.edge(in).labels.contains(schema::kOperandEdge))
        throw Error(Errc::ImportError, "atom vertex " + std::to_string(v.value) + " has operand edges");
    }
    f = Formula::atom(atom->text());
  } else if (const graph::Value* op = g.property(v, schema::kOpKey); op && op->is_text()) {
    std::map<std::int64_t, VertexId> by_index;
    for (graph::EdgeId in : g.in_edges(v)) {
      const auto& ie = g.edge(in);
      if (!ie.labels.contains(schema::kOperandEdge)) continue;
      const graph::Value* k = g.property(in, schema::kOperandKey);
      if (!k || !k->is_int() || !by_index.emplace(k->integer(), ie.src).second)
        throw Error(Errc::ImportError, "bad operand edges into vertex " + std::to_string(v.value));
    }
    if (!visiting.insert(v).second)
      throw Error(Errc::ImportError, "operand cycle through vertex " + std::to_string(v.value));
    std::vector<Formula> operands;
    std::int64_t expect = 1;
    for (const auto& [idx, src] : by_index) {
      if (idx != expect++) throw Error(Errc::ImportError, "operand numbering gap at vertex " + std::to_string(v.value));
      operands.push_back(decode(g, src, visiting));
    }
    if (operands.empty()) throw Error(Errc::ImportError, "compound vertex without operands");
    visiting.erase(v);
    f = Formula::compound(op->text(), std::move(operands));
  } else {
    throw Error(Errc::ImportError, "formula vertex " + std::to_string(v.value) + " has neither op nor atom");
  }
  formulas_[v.value] = f;
  ids_.emplace(f, v);
  return f;
}

}  // namespace glf
