#include "glf/proofgraph.hpp"

#include <algorithm>
#include <map>

namespace glf {

namespace ps = proof_schema;
using graph::EdgeId;
using graph::PropertyGraph;
using graph::VertexId;

std::string_view status_name(NodeStatus s) {
  switch (s) {
    case NodeStatus::Goal: return "goal";
    case NodeStatus::Leaf: return "leaf";
    case NodeStatus::Regular: return "regular";
  }
  return "?";
}

std::string ProofReport::summary() const {
  if (!violations.empty()) return "invariant violated: " + violations.front();
  if (open_goals == 1) return "1 open goal";
  if (open_goals > 1) return std::to_string(open_goals) + " open goals";
  return "complete";
}

namespace {

std::string vname(VertexId v) { return "vertex " + std::to_string(v.value); }

bool has_label(const PropertyGraph& g, EdgeId e, const char* label) { return g.edge(e).labels.contains(label); }

std::optional<NodeStatus> parse_status(const graph::Value* v) {
  if (!v || !v->is_text()) return std::nullopt;
  if (v->text() == "goal") return NodeStatus::Goal;
  if (v->text() == "leaf") return NodeStatus::Leaf;
  if (v->text() == "regular") return NodeStatus::Regular;
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// ProofState

ProofState::ProofState(std::string system, OperatorTable table, const Formula& goal)
    : system_(std::move(system)), table_(std::move(table)), goal_(goal) {
  VertexId fv = store_.intern(g_, goal);
  root_ = g_.add_vertex({ps::kDeduction}, {{ps::kStatus, "goal"}});
  g_.add_edge(root_, fv, {ps::kDerives});
  goals_ = {root_};
}

bool ProofState::is_deduction(VertexId v) const {
  return g_.has_vertex(v) && g_.vertex(v).labels.contains(ps::kDeduction);
}

NodeStatus ProofState::status(VertexId node) const {
  if (!is_deduction(node)) throw Error(Errc::UnknownVertex, vname(node) + " is not a deduction");
  auto s = parse_status(g_.property(node, ps::kStatus));
  if (!s) throw Error(Errc::ImportError, vname(node) + " has no valid status");
  return *s;
}

VertexId ProofState::formula_vertex(VertexId node) const {
  for (EdgeId e : g_.out_edges(node))
    if (has_label(g_, e, ps::kDerives)) return g_.edge(e).dst;
  throw Error(Errc::UnknownVertex, vname(node) + " derives no formula");
}

Formula ProofState::formula(VertexId node) const { return decoded(formula_vertex(node)); }

std::optional<std::string> ProofState::rule(VertexId node) const {
  const graph::Value* r = g_.property(node, ps::kRule);
  if (!r || !r->is_text()) return std::nullopt;
  return r->text();
}

std::vector<std::pair<std::string, VertexId>> ProofState::premises(VertexId node) const {
  std::vector<std::tuple<std::int64_t, std::string, VertexId>> tmp;
  for (EdgeId e : g_.out_edges(node)) {
    if (!has_label(g_, e, ps::kPremise)) continue;
    const graph::Value* idx = g_.property(e, ps::kIndex);
    const graph::Value* role = g_.property(e, ps::kRole);
    tmp.emplace_back(idx && idx->is_int() ? idx->integer() : 0, role && role->is_text() ? role->text() : "",
                     g_.edge(e).dst);
  }
  std::sort(tmp.begin(), tmp.end());
  std::vector<std::pair<std::string, VertexId>> out;
  for (auto& [i, role, child] : tmp) out.emplace_back(std::move(role), child);
  return out;
}

std::optional<VertexId> ProofState::parent(VertexId node) const {
  for (EdgeId e : g_.in_edges(node))
    if (has_label(g_, e, ps::kPremise)) return g_.edge(e).src;
  return std::nullopt;
}

Formula ProofState::decoded(VertexId v) const {
  if (auto it = decoded_.find(v); it != decoded_.end()) return it->second;
  Formula f = store_.formula_at(g_, v);
  decoded_.emplace(v, f);
  return f;
}

FormulaSet ProofState::assumed_at(VertexId node) const {
  FormulaSet out;
  for (EdgeId e : g_.out_edges(node))
    if (has_label(g_, e, ps::kAssumes)) out.insert(decoded(g_.edge(e).dst));
  return out;
}

FormulaSet ProofState::hypotheses(VertexId node) const {
  if (auto it = hyps_cache_.find(node); it != hyps_cache_.end()) return it->second;
  // Walk up to the root or the nearest cached ancestor, then fill in the
  // path top-down.
  std::vector<VertexId> path;
  std::set<VertexId> seen;
  FormulaSet acc;
  std::optional<VertexId> cur = node;
  while (cur && seen.insert(*cur).second) {
    if (auto it = hyps_cache_.find(*cur); it != hyps_cache_.end()) {
      acc = it->second;
      break;
    }
    path.push_back(*cur);
    cur = parent(*cur);
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    acc.merge(assumed_at(*it));
    hyps_cache_[*it] = acc;
  }
  return acc;
}

const FormulaSet& ProofState::universe() const {
  if (universe_rev_ != g_.revision()) {
    universe_.clear();
    for (VertexId v : g_.vertices_with_label(schema::kFormula)) universe_.insert(decoded(v));
    universe_rev_ = g_.revision();
  }
  return universe_;
}

std::vector<VertexId> ProofState::deductions() const {
  std::vector<VertexId> out;
  std::set<VertexId> seen;
  std::vector<VertexId> stack{root_};
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    if (!seen.insert(v).second) continue;
    out.push_back(v);
    auto ps = premises(v);
    for (auto it = ps.rbegin(); it != ps.rend(); ++it) stack.push_back(it->second);
  }
  return out;
}

std::vector<VertexId> ProofState::open_goals() const { return goals_; }

std::optional<VertexId> ProofState::focus() const {
  if (goals_.empty()) return std::nullopt;
  return goals_.front();
}

std::vector<VertexId> ProofState::scan_goals() const {
  std::vector<VertexId> out;
  for (VertexId v : deductions())
    if (parse_status(g_.property(v, ps::kStatus)) == NodeStatus::Goal) out.push_back(v);
  return out;
}

void ProofState::require_goal(VertexId node) const {
  if (!is_deduction(node) || status(node) != NodeStatus::Goal)
    throw Error(Errc::NotAGoal, vname(node) + " is not an open goal");
}

void ProofState::close_with_hypothesis(VertexId goal) {
  require_goal(goal);
  Formula f = formula(goal);
  if (!hypotheses(goal).contains(f))
    throw Error(Errc::NotAHypothesis, to_sexpr(f) + " is not a hypothesis in scope");
  graph::GraphPattern p;
  p.nodes.push_back({"d", {ps::kDeduction}, {{ps::kStatus, graph::Cmp::Eq, "goal"}}, goal});
  graph::TransformScript t;
  t.actions.push_back(graph::action::SetProperty{"d", ps::kStatus, "leaf"});
  t.actions.push_back(graph::action::SetProperty{"d", ps::kLeafKind, "hypothesis"});
  auto r = graph::apply_transform(g_, p, t);
  history_.push_back({r.undo, goals_});
  goals_.erase(std::find(goals_.begin(), goals_.end(), goal));
}

std::vector<VertexId> ProofState::expand(VertexId goal, const std::string& rule,
                                         const std::vector<NewBranch>& branches) {
  require_goal(goal);
  graph::Savepoint sp = g_.savepoint();
  try {
    graph::GraphPattern p;
    p.nodes.push_back({"d", {ps::kDeduction}, {{ps::kStatus, graph::Cmp::Eq, "goal"}}, goal});
    graph::TransformScript t;
    t.actions.push_back(graph::action::SetProperty{"d", ps::kStatus, "regular"});
    t.actions.push_back(graph::action::SetProperty{"d", ps::kRule, rule});
    std::map<Formula, std::string> formula_binders;
    auto bind_formula = [&](const Formula& f) {
      auto [it, fresh] = formula_binders.emplace(f, "f" + std::to_string(formula_binders.size()));
      if (fresh) p.nodes.push_back({it->second, {schema::kFormula}, {}, store_.intern(g_, f)});
      return it->second;
    };
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const auto& b = branches[i];
      std::string c = "c" + std::to_string(i);
      t.actions.push_back(graph::action::CreateVertex{c, {ps::kDeduction}, {{ps::kStatus, "goal"}}});
      t.actions.push_back(graph::action::CreateEdge{
          "", "d", c, {ps::kPremise}, {{ps::kRole, b.role}, {ps::kIndex, static_cast<std::int64_t>(i + 1)}}});
      t.actions.push_back(graph::action::CreateEdge{"", c, bind_formula(b.goal), {ps::kDerives}, {}});
      FormulaSet hyps(b.hypotheses.begin(), b.hypotheses.end());
      for (const auto& h : hyps) t.actions.push_back(graph::action::CreateEdge{"", c, bind_formula(h), {ps::kAssumes}, {}});
    }
    auto r = graph::apply_transform(g_, p, t);
    std::vector<VertexId> children;
    for (std::size_t i = 0; i < branches.size(); ++i) children.push_back(r.created_vertices.at("c" + std::to_string(i)));
    history_.push_back({sp, goals_});
    auto at = goals_.erase(std::find(goals_.begin(), goals_.end(), goal));
    goals_.insert(at, children.begin(), children.end());
    return children;
  } catch (...) {
    g_.rollback(sp);
    throw;
  }
}

void ProofState::undo() {
  if (history_.empty()) throw Error(Errc::NothingToUndo, "no rule application to undo");
  g_.rollback(history_.back().first);
  goals_ = std::move(history_.back().second);
  history_.pop_back();
}

ProofReport ProofState::check(const PremiseCount& premise_count) const {
  ProofReport rep;
  auto& bad = rep.violations;
  const auto& g = g_;

  // Formula vertices must decode against the operator table.
  for (VertexId v : g.vertices_with_label(schema::kFormula)) {
    try {
      Formula f = store_.formula_at(g, v);
      if (!f.is_atom()) {
        const Operator* op = table_.find(f.symbol());
        if (!op) bad.push_back(vname(v) + " uses unknown operator " + f.symbol());
        else if (static_cast<std::size_t>(op->arity) != f.arity())
          bad.push_back(vname(v) + " has wrong arity for " + f.symbol());
      }
    } catch (const Error& e) {
      bad.push_back(e.detail());
    }
  }

  for (const auto& [id, e] : g.edges()) {
    const bool from_d = is_deduction(e.src), to_d = is_deduction(e.dst);
    const bool to_f = g.vertex(e.dst).labels.contains(schema::kFormula);
    if (e.labels.contains(ps::kPremise) && !(from_d && to_d))
      bad.push_back("premise edge " + std::to_string(id.value) + " does not join two deductions");
    if ((e.labels.contains(ps::kDerives) || e.labels.contains(ps::kAssumes)) && !(from_d && to_f))
      bad.push_back("edge " + std::to_string(id.value) + " must run from a deduction to a formula");
  }

  std::size_t open = 0;
  for (VertexId v : g.vertices_with_label(ps::kDeduction)) {
    std::size_t derives = 0, premise_edges = 0, incoming = 0;
    std::set<std::int64_t> indices;
    for (EdgeId e : g.out_edges(v)) {
      if (has_label(g, e, ps::kDerives)) ++derives;
      if (has_label(g, e, ps::kPremise)) {
        ++premise_edges;
        const graph::Value* idx = g.property(e, ps::kIndex);
        const graph::Value* role = g.property(e, ps::kRole);
        if (!idx || !idx->is_int() || !indices.insert(idx->integer()).second)
          bad.push_back("premise edge " + std::to_string(e.value) + " has a missing or repeated index");
        if (!role || !role->is_text() || role->text().empty())
          bad.push_back("premise edge " + std::to_string(e.value) + " has no role");
      }
    }
    for (EdgeId e : g.in_edges(v))
      if (has_label(g, e, ps::kPremise)) ++incoming;
    if (derives != 1) bad.push_back(vname(v) + " has " + std::to_string(derives) + " derives edges");
    if (v == root_ ? incoming != 0 : incoming != 1)
      bad.push_back(vname(v) + " has " + std::to_string(incoming) + " incoming premise edges");
    if (!indices.empty() && (*indices.begin() != 1 || *indices.rbegin() != static_cast<std::int64_t>(indices.size())))
      bad.push_back(vname(v) + " has non-contiguous premise indices");

    auto st = parse_status(g.property(v, ps::kStatus));
    if (!st) {
      bad.push_back(vname(v) + " has no valid status");
      continue;
    }
    switch (*st) {
      case NodeStatus::Goal:
        ++open;
        if (premise_edges) bad.push_back("open goal " + vname(v) + " has premise edges");
        break;
      case NodeStatus::Leaf: {
        if (premise_edges) bad.push_back("leaf " + vname(v) + " has premise edges");
        const graph::Value* kind = g.property(v, ps::kLeafKind);
        if (!kind || !kind->is_text() || kind->text() != "hypothesis") {
          bad.push_back("leaf " + vname(v) + " has no valid leafKind");
        } else if (derives == 1) {
          try {
            if (!hypotheses(v).contains(formula(v)))
              bad.push_back("leaf " + vname(v) + " is not a hypothesis in scope");
          } catch (const Error& e) {
            bad.push_back(e.detail());
          }
        }
        break;
      }
      case NodeStatus::Regular: {
        auto r = rule(v);
        if (!r) {
          bad.push_back(vname(v) + " has no rule");
        } else if (premise_count) {
          auto n = premise_count(*r);
          if (!n) bad.push_back(vname(v) + " applies unknown rule " + *r);
          else if (*n != premise_edges)
            bad.push_back(vname(v) + " applies " + *r + " with " + std::to_string(premise_edges) +
                          " premise edges, expected " + std::to_string(*n));
        }
        break;
      }
    }
  }

  // Tree shape: every deduction reachable from the root exactly once.
  if (!is_deduction(root_)) {
    bad.push_back("root is not a deduction");
  } else {
    std::set<VertexId> seen;
    std::vector<VertexId> stack{root_};
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      if (!seen.insert(v).second) {
        bad.push_back("deduction " + vname(v) + " is reached twice");
        break;
      }
      for (EdgeId e : g.out_edges(v))
        if (has_label(g, e, ps::kPremise) && is_deduction(g.edge(e).dst)) stack.push_back(g.edge(e).dst);
    }
    for (VertexId v : g.vertices_with_label(ps::kDeduction))
      if (!seen.contains(v)) bad.push_back("deduction " + vname(v) + " is unreachable from the root");
    try {
      if (formula(root_) != goal_) bad.push_back("root does not derive the root goal");
    } catch (const Error&) {
    }
  }

  rep.open_goals = open;
  rep.complete = bad.empty() && open == 0;
  return rep;
}

nlohmann::json ProofState::to_document() const {
  nlohmann::json doc = g_.to_document();
  doc["system"] = system_;
  doc["rootGoal"] = to_sexpr(goal_);
  return doc;
}

ProofState ProofState::from_document(const nlohmann::json& doc, const OperatorTable& table,
                                     const PremiseCount& premise_count) {
  if (!doc.is_object() || !doc.contains("system") || !doc["system"].is_string() || !doc.contains("rootGoal") ||
      !doc["rootGoal"].is_string())
    throw Error(Errc::ImportError, "proof document needs string fields system and rootGoal");
  ProofState st;
  st.system_ = doc["system"].get<std::string>();
  st.table_ = table;
  try {
    st.goal_ = parse_formula(table, doc["rootGoal"].get<std::string>());
  } catch (const Error& e) {
    throw Error(Errc::ImportError, "rootGoal: " + e.detail());
  }
  st.g_ = PropertyGraph::from_document(doc);
  std::vector<VertexId> roots;
  for (VertexId v : st.g_.vertices_with_label(ps::kDeduction)) {
    bool has_parent = false;
    for (EdgeId e : st.g_.in_edges(v)) has_parent |= has_label(st.g_, e, ps::kPremise);
    if (!has_parent) roots.push_back(v);
  }
  if (roots.size() != 1)
    throw Error(Errc::ImportError, "expected exactly one root deduction, found " + std::to_string(roots.size()));
  st.root_ = roots.front();
  st.goals_ = st.scan_goals();
  ProofReport rep = st.check(premise_count);
  if (!rep.violations.empty()) throw Error(Errc::ImportError, rep.violations.front());
  return st;
}

// ---------------------------------------------------------------------------
// LinearState

LinearState::LinearState(std::string system, OperatorTable table, const Formula& goal)
    : system_(std::move(system)), table_(std::move(table)), goal_(goal) {
  subproofs_.push_back(Subproof{0, -1, false, 0, std::nullopt, std::nullopt, 1, true});
  open_.push_back(0);
}

const Line& LinearState::line(int index) const {
  if (!has_line(index)) throw Error(Errc::ScopeError, "no line " + std::to_string(index));
  return lines_[static_cast<std::size_t>(index - 1)];
}

bool LinearState::citable(int index, bool cross_strict, int drop) const {
  if (!has_line(index) || drop < 0 || static_cast<std::size_t>(drop) >= open_.size()) return false;
  int sp = line(index).subproof;
  // Walk the open chain from the innermost subproof outwards.
  for (auto it = open_.rbegin() + drop; it != open_.rend(); ++it) {
    if (*it == sp) return true;
    if (subproofs_[static_cast<std::size_t>(*it)].strict && !cross_strict) return false;
  }
  return false;
}

std::optional<int> LinearState::citable_line_with(const Formula& f, int drop) const {
  for (const auto& l : lines_)
    if (l.formula == f && citable(l.index, false, drop)) return l.index;
  return std::nullopt;
}

const FormulaSet& LinearState::universe() const {
  if (universe_lines_ != lines_.size()) {
    universe_ = subformulas(goal_);
    for (const auto& l : lines_) universe_.merge(subformulas(l.formula));
    universe_lines_ = lines_.size();
  }
  return universe_;
}

std::vector<std::optional<Formula>> LinearState::target_chain() const {
  // A subproof inherits a target when its hypothesis is the antecedent of an
  // implication target, and asks for the body of a boxed target when strict.
  // Subproofs aimed at a contradiction have none, unless opened to prove a
  // stated implication.
  std::vector<std::optional<Formula>> chain;
  std::optional<Formula> t = goal_;
  chain.push_back(t);
  for (std::size_t k = 1; k < open_.size(); ++k) {
    const Subproof& sp = subproofs_[static_cast<std::size_t>(open_[k])];
    std::optional<Formula> next;
    if (sp.strict) {
      if (t && !t->is_atom() && t->symbol() == "box") next = t->operand(1);
    } else if (sp.hypothesis) {
      const Formula& h = line(*sp.hypothesis).formula;
      if (sp.aim) next = sp.aim->operand(2);
      else if (t && !t->is_atom() && t->symbol() == "->" && t->operand(1) == h) next = t->operand(2);
      else if (t && !t->is_atom() && t->symbol() == "not" && t->operand(1) == h) next = std::nullopt;
      else if (t && !h.is_atom() && h.symbol() == "not" && h.operand(1) == *t) next = std::nullopt;
      else next = t;
    }
    t = next;
    chain.push_back(t);
  }
  return chain;
}

std::optional<Formula> LinearState::target() const { return target_chain().back(); }

std::vector<Formula> LinearState::targets() const {
  auto chain = target_chain();
  std::vector<Formula> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    if (*it && std::find(out.begin(), out.end(), **it) == out.end()) out.push_back(**it);
  return out;
}

int LinearState::append(Line l) {
  l.index = static_cast<int>(lines_.size()) + 1;
  l.subproof = current();
  l.depth = depth();
  if (l.hypothesis) l.deps.insert(l.index);
  lines_.push_back(std::move(l));
  return lines_.back().index;
}

int LinearState::open_subproof(bool strict) {
  Subproof sp;
  sp.id = static_cast<int>(subproofs_.size());
  sp.parent = current();
  sp.strict = strict;
  sp.depth = depth() + 1;
  sp.first_line = static_cast<int>(lines_.size()) + 1;
  subproofs_.push_back(sp);
  open_.push_back(sp.id);
  return sp.id;
}

void LinearState::set_hypothesis(int line, std::optional<Formula> aim) {
  if (open_.size() <= 1) throw Error(Errc::ScopeError, "no open subproof");
  auto& sp = subproofs_[static_cast<std::size_t>(open_.back())];
  sp.hypothesis = line;
  sp.aim = std::move(aim);
}

void LinearState::close_subproof() {
  if (open_.size() <= 1) throw Error(Errc::ScopeError, "no open subproof to close");
  subproofs_[static_cast<std::size_t>(open_.back())].open = false;
  open_.pop_back();
}

bool LinearState::complete() const {
  if (open_.size() != 1) return false;
  for (const auto& l : lines_)
    if (l.subproof == 0 && l.deps.empty() && l.formula == goal_) return true;
  return false;
}

ProofReport LinearState::check() const {
  ProofReport rep;
  for (const auto& l : lines_) {
    for (const auto& [role, c] : l.cites)
      if (c < 1 || c >= l.index)
        rep.violations.push_back("line " + std::to_string(l.index) + " cites line " + std::to_string(c) +
                                 " which does not precede it");
  }
  rep.open_goals = complete() ? 0 : 1;
  rep.complete = rep.violations.empty() && rep.open_goals == 0;
  return rep;
}

PropertyGraph LinearState::to_graph() const {
  PropertyGraph g;
  FormulaStore store;
  std::vector<VertexId> nodes;
  for (const auto& l : lines_) {
    VertexId fv = store.intern(g, l.formula);
    graph::PropertyList props{{ps::kLine, static_cast<std::int64_t>(l.index)},
                              {ps::kDepth, static_cast<std::int64_t>(l.depth)}};
    if (l.hypothesis) {
      props.emplace_back(ps::kStatus, "leaf");
      props.emplace_back(ps::kLeafKind, "hypothesis");
    } else {
      props.emplace_back(ps::kStatus, "regular");
    }
    props.emplace_back(ps::kRule, l.rule);
    VertexId d = g.add_vertex({ps::kDeduction}, props);
    g.add_edge(d, fv, {ps::kDerives});
    for (std::size_t i = 0; i < l.cites.size(); ++i) {
      g.add_edge(d, nodes[static_cast<std::size_t>(l.cites[i].second - 1)], {ps::kPremise},
                 {{ps::kRole, l.cites[i].first}, {ps::kIndex, static_cast<std::int64_t>(i + 1)}});
    }
    nodes.push_back(d);
  }
  return g;
}

}  // namespace glf
