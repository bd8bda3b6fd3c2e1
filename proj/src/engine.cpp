#include "glf/engine.hpp"

#include <algorithm>
#include <functional>

namespace glf {

using graph::VertexId;

namespace {

FormulaSet filtered(const FormulaSet& in, const Constraint& c) {
  if (c.empty()) return in;
  FormulaSet out;
  for (const auto& f : in)
    if (c.accepts(f)) out.insert(f);
  return out;
}

std::string show(const Formula& f) { return to_sexpr(f); }

nlohmann::json formula_json(const OperatorTable& t, const Formula& f) {
  return {{"sexpr", to_sexpr(f)}, {"infix", render(t, f, RenderStyle::Infix)}};
}

// ---------------------------------------------------------------------------
// Backward enumeration

struct Candidate {
  std::map<std::string, Formula> args;
  std::vector<NewBranch> branches;
  bool ambiguous = false;
};

FormulaSet arg_candidates(const ArgSource& src, const RefContext& ctx, const FormulaSet& hyps, bool hyps_only) {
  switch (src.kind) {
    case ArgSource::Kind::Ref: {
      FormulaSet out = eval_ref(src.ref, ctx);
      if (hyps_only) std::erase_if(out, [&](const Formula& f) { return !hyps.contains(f); });
      return out;
    }
    case ArgSource::Kind::Universe: return filtered(hyps_only ? hyps : *ctx.universe, src.constraint);
    case ArgSource::Kind::Hypotheses: return filtered(hyps, src.constraint);
  }
  return {};
}

// Branches for a complete argument binding; nullopt when some branch goal
// is empty.
std::optional<Candidate> build_branches(const Rule& rule, const Formula& goal, const FormulaSet& hyps,
                                        const FormulaSet& universe, const std::map<std::string, Formula>& args) {
  Candidate c;
  c.args = args;
  RefContext ctx{goal, &universe, &c.args};
  for (const auto& b : rule.branches) {
    FormulaSet gs = b.goal.eval(ctx);
    if (gs.empty()) return std::nullopt;
    if (gs.size() > 1) c.ambiguous = true;
    NewBranch nb;
    nb.role = b.role;
    nb.goal = *gs.begin();
    FormulaSet added;
    for (const auto& h : b.hypotheses) added.merge(h.eval(ctx));
    for (const auto& h : added)
      if (!hyps.contains(h)) nb.hypotheses.push_back(h);
    c.branches.push_back(std::move(nb));
  }
  return c;
}

std::vector<Candidate> backward_candidates(const Rule& rule, const Formula& goal, const FormulaSet& hyps,
                                           const FormulaSet& universe, bool hyps_only) {
  std::vector<Candidate> out;
  if (rule.leaf_hypothesis) {
    if (hyps.contains(goal)) out.push_back(Candidate{});
    return out;
  }
  std::map<std::string, Formula> bound;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == rule.args.size()) {
      if (auto c = build_branches(rule, goal, hyps, universe, bound)) out.push_back(std::move(*c));
      return;
    }
    const auto& [name, src] = rule.args[i];
    RefContext ctx{goal, &universe, &bound};
    for (const auto& f : arg_candidates(src, ctx, hyps, hyps_only)) {
      bound[name] = f;
      go(i + 1);
    }
    bound.erase(name);
  };
  go(0);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Proof

void Proof::check_style(const Rule& rule) const {
  bool ok = calc_->style == Style::Backward ? rule.style == Style::Backward : rule.style != Style::Backward;
  if (!ok)
    throw Error(Errc::WrongStyle, "rule " + rule.name + " is " + std::string(style_name(rule.style)) +
                                      " but the proof is " + std::string(style_name(calc_->style)));
}

std::unique_ptr<Proof> Proof::create(std::shared_ptr<const Calculus> calculus, const Formula& goal) {
  if (!calculus) throw Error(Errc::UnknownSystem, "no system");
  if (calculus->style == Style::Backward) return std::make_unique<BackwardProof>(std::move(calculus), goal);
  return std::make_unique<LinearProof>(std::move(calculus), goal);
}

std::unique_ptr<Proof> Proof::import(std::shared_ptr<const Calculus> calculus, const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(Errc::ImportError, "proof document must be an object");
  if (doc.contains("system") && doc["system"].is_string() && doc["system"].get<std::string>() != calculus->name)
    throw Error(Errc::ImportError, "document belongs to system " + doc["system"].get<std::string>());
  if (calculus->style == Style::Backward) {
    const Calculus& c = *calculus;
    auto count = [&c](const std::string& rule) -> std::optional<std::size_t> {
      const Rule* r = c.find_rule(rule);
      if (!r) return std::nullopt;
      return r->premise_count();
    };
    auto p = std::make_unique<BackwardProof>(calculus, ProofState::from_document(doc, calculus->table, count));
    auto problems = p->verify();
    if (!problems.empty()) throw Error(Errc::ImportError, problems.front());
    return p;
  }
  if (!doc.contains("rootGoal") || !doc["rootGoal"].is_string() || !doc.contains("steps") || !doc["steps"].is_array())
    throw Error(Errc::ImportError, "linear proof document needs rootGoal and steps");
  Formula goal;
  try {
    goal = parse_formula(calculus->table, doc["rootGoal"].get<std::string>());
  } catch (const Error& e) {
    throw Error(Errc::ImportError, "rootGoal: " + e.detail());
  }
  auto p = std::make_unique<LinearProof>(calculus, goal);
  std::size_t n = 0;
  for (const auto& s : doc["steps"]) {
    ++n;
    try {
      if (!s.is_object() || !s.contains("rule") || !s["rule"].is_string())
        throw Error(Errc::ImportError, "step without a rule");
      p->apply(s["rule"].get<std::string>(), Assignment::from_json(s, calculus->table));
    } catch (const Error& e) {
      throw Error(Errc::ImportError, "step " + std::to_string(n) + ": " + std::string(e.name()) + ": " + e.detail());
    }
  }
  nlohmann::json again = p->to_document();
  for (const char* key : {"vertices", "edges"}) {
    if (doc.contains(key) && doc[key] != again[key])
      throw Error(Errc::ImportError, std::string("recorded ") + key + " disagree with the replayed steps");
  }
  return p;
}

std::vector<std::string> applicable_rules(const Proof& p) {
  std::vector<std::string> out;
  for (const auto& r : p.calculus().rules) {
    if (r->style == Style::Backward ? p.style() != Style::Backward : p.style() == Style::Backward) continue;
    if (!p.applicable(*r).empty()) out.push_back(r->name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// BackwardProof

BackwardProof::BackwardProof(std::shared_ptr<const Calculus> calculus, const Formula& goal)
    : Proof(calculus), st_(calculus->name, calculus->table, goal) {}

BackwardProof::BackwardProof(std::shared_ptr<const Calculus> calculus, ProofState state)
    : Proof(std::move(calculus)), st_(std::move(state)) {}

std::vector<Assignment> BackwardProof::applicable(const Rule& rule, const Enumerator& filter,
                                                  std::optional<VertexId> target) const {
  if (rule.style != Style::Backward) return {};
  if (!target) target = st_.focus();
  if (!target || !st_.is_deduction(*target) || st_.status(*target) != NodeStatus::Goal) return {};
  const Formula goal = st_.formula(*target);
  const FormulaSet hyps = st_.hypotheses(*target);
  const FormulaSet& universe = st_.universe();

  // (goal, node) pairs from the target up to the root.
  std::vector<std::pair<Formula, VertexId>> path;
  if (filter.nocycle) {
    std::optional<VertexId> cur = target;
    while (cur) {
      path.emplace_back(st_.formula(*cur), *cur);
      cur = st_.parent(*cur);
    }
  }

  std::vector<Assignment> out;
  for (auto& c : backward_candidates(rule, goal, hyps, universe, filter.hypotheses)) {
    bool keep = true;
    for (const auto& b : c.branches) {
      if (filter.subformula) {
        keep = keep && universe.contains(b.goal);
        for (const auto& h : b.hypotheses) keep = keep && universe.contains(h);
      }
      if (filter.nocycle && keep) {
        for (const auto& [f, node] : path) {
          if (f != b.goal) continue;
          FormulaSet child = hyps;
          child.insert(b.hypotheses.begin(), b.hypotheses.end());
          if (st_.hypotheses(node) == child) {
            keep = false;
            break;
          }
        }
      }
    }
    if (!keep) continue;
    Assignment a;
    a.target = target;
    a.args = std::move(c.args);
    out.push_back(std::move(a));
  }
  return out;
}

void BackwardProof::apply(const Rule& rule, const Assignment& a) {
  check_style(rule);
  std::optional<VertexId> target = a.target ? a.target : st_.focus();
  if (!target) throw Error(Errc::NotAGoal, "the proof has no open goals");
  if (!st_.is_deduction(*target) || st_.status(*target) != NodeStatus::Goal)
    throw Error(Errc::NotAGoal, "vertex " + std::to_string(target->value) + " is not an open goal");
  if (!a.lines.empty() || a.result) throw Error(Errc::NotApplicable, "backward rules take formula arguments only");

  Step step{rule.name, a};
  if (rule.leaf_hypothesis) {
    st_.close_with_hypothesis(*target);
    steps_.push_back(std::move(step));
    return;
  }

  const Formula goal = st_.formula(*target);
  const FormulaSet hyps = st_.hypotheses(*target);
  const FormulaSet universe = st_.universe();
  for (const auto& [name, f] : a.args) {
    auto names = rule.arg_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw Error(Errc::NotApplicable, "rule " + rule.name + " has no argument " + name);
  }
  std::map<std::string, Formula> bound;
  for (const auto& [name, src] : rule.args) {
    RefContext ctx{goal, &universe, &bound};
    FormulaSet cands = arg_candidates(src, ctx, hyps, false);
    if (auto it = a.args.find(name); it != a.args.end()) {
      if (!cands.contains(it->second))
        throw Error(Errc::NotApplicable, "argument " + name + " = " + show(it->second) + " is not admissible for " +
                                             rule.name + " on goal " + show(goal));
      bound[name] = it->second;
    } else if (cands.size() == 1) {
      bound[name] = *cands.begin();
    } else if (cands.empty()) {
      throw Error(Errc::NotApplicable, "rule " + rule.name + " does not apply to goal " + show(goal));
    } else {
      throw Error(Errc::UnboundArgument,
                  "argument " + name + " must be chosen among " + std::to_string(cands.size()) + " candidates");
    }
  }
  RefContext ctx{goal, &universe, &bound};
  std::vector<NewBranch> branches;
  for (const auto& b : rule.branches) {
    FormulaSet gs = b.goal.eval(ctx);
    if (gs.empty())
      throw Error(Errc::NotApplicable, "rule " + rule.name + ": branch goal " + b.goal.to_string() + " is empty");
    if (gs.size() > 1)
      throw Error(Errc::AmbiguousBranchGoal, "rule " + rule.name + ": branch goal " + b.goal.to_string() + " yields " +
                                                 std::to_string(gs.size()) + " formulas");
    NewBranch nb{b.role, *gs.begin(), {}};
    FormulaSet added;
    for (const auto& h : b.hypotheses) added.merge(h.eval(ctx));
    for (const auto& h : added)
      if (!hyps.contains(h)) nb.hypotheses.push_back(h);
    branches.push_back(std::move(nb));
  }
  st_.expand(*target, rule.name, branches);
  step.assignment.args = bound;
  steps_.push_back(std::move(step));
}

void BackwardProof::undo() {
  st_.undo();
  if (!steps_.empty()) steps_.pop_back();
}

ProofReport BackwardProof::check() const {
  const Calculus& c = *calc_;
  return st_.check([&c](const std::string& rule) -> std::optional<std::size_t> {
    const Rule* r = c.find_rule(rule);
    if (!r) return std::nullopt;
    return r->premise_count();
  });
}

std::vector<std::string> BackwardProof::verify() const {
  std::vector<std::string> out;
  const FormulaSet& universe = st_.universe();
  for (VertexId v : st_.deductions()) {
    if (st_.status(v) != NodeStatus::Regular) continue;
    auto name = st_.rule(v);
    const Rule* rule = name ? calc_->find_rule(*name) : nullptr;
    if (!rule || rule->style != Style::Backward || rule->leaf_hypothesis) {
      out.push_back("vertex " + std::to_string(v.value) + " applies unknown rule " + name.value_or("?"));
      continue;
    }
    const Formula goal = st_.formula(v);
    const FormulaSet hyps = st_.hypotheses(v);
    auto children = st_.premises(v);
    bool found = false;
    for (const auto& c : backward_candidates(*rule, goal, hyps, universe, false)) {
      if (c.ambiguous || c.branches.size() != children.size()) continue;
      bool same = true;
      for (std::size_t i = 0; i < children.size() && same; ++i) {
        const auto& b = c.branches[i];
        FormulaSet want(b.hypotheses.begin(), b.hypotheses.end());
        same = b.role == children[i].first && b.goal == st_.formula(children[i].second) &&
               want == st_.assumed_at(children[i].second);
      }
      if (same) {
        found = true;
        break;
      }
    }
    if (!found) out.push_back("vertex " + std::to_string(v.value) + " is not a valid application of " + *name);
  }
  return out;
}

nlohmann::json BackwardProof::snapshot() const {
  const auto& t = calc_->table;
  nlohmann::json j;
  j["style"] = "backward";
  j["system"] = calc_->name;
  j["rootGoal"] = formula_json(t, st_.root_goal());
  j["root"] = std::to_string(st_.root().value);
  auto rep = check();
  j["complete"] = rep.complete;
  j["summary"] = rep.summary();
  auto focus = st_.focus();
  j["focus"] = focus ? nlohmann::json(std::to_string(focus->value)) : nlohmann::json(nullptr);
  auto goals = nlohmann::json::array();
  auto nodes = nlohmann::json::array();
  for (VertexId v : st_.deductions()) {
    nlohmann::json n;
    n["id"] = std::to_string(v.value);
    NodeStatus s = st_.status(v);
    n["status"] = std::string(status_name(s));
    n["formula"] = formula_json(t, st_.formula(v));
    if (auto r = st_.rule(v)) n["rule"] = *r;
    if (s == NodeStatus::Leaf) n["leafKind"] = "hypothesis";
    auto ps = nlohmann::json::array();
    for (const auto& [role, child] : st_.premises(v)) ps.push_back({{"role", role}, {"child", std::to_string(child.value)}});
    n["premises"] = ps;
    auto added = nlohmann::json::array();
    for (const auto& h : st_.assumed_at(v)) added.push_back(formula_json(t, h));
    n["newHypotheses"] = added;
    auto hyps = nlohmann::json::array();
    for (const auto& h : st_.hypotheses(v)) hyps.push_back(formula_json(t, h));
    n["hypotheses"] = hyps;
    nodes.push_back(std::move(n));
  }
  for (VertexId g : st_.open_goals())
    for (const auto& n : nodes)
      if (n["id"] == std::to_string(g.value)) goals.push_back(n);
  j["openGoals"] = goals;
  j["nodes"] = nodes;
  j["steps"] = steps_.size();
  return j;
}

bool BackwardProof::same_state(const Proof& other) const {
  auto* o = dynamic_cast<const BackwardProof*>(&other);
  return o && st_.graph() == o->st_.graph() && st_.root() == o->st_.root();
}

bool BackwardProof::same_structure(const Proof& other) const {
  auto* o = dynamic_cast<const BackwardProof*>(&other);
  return o && st_.graph().compacted() == o->st_.graph().compacted();
}

// ---------------------------------------------------------------------------
// LinearProof

LinearProof::LinearProof(std::shared_ptr<const Calculus> calculus, const Formula& goal)
    : Proof(calculus), st_(calculus->name, calculus->table, goal) {}

namespace {

Formula negate(const Formula& f) { return Formula::compound("not", {f}); }

bool is_op(const Formula& f, std::string_view op) { return !f.is_atom() && f.symbol() == op; }

// Premise lines bound so far, by role, as formulas for reference evaluation.
std::map<std::string, Formula> premise_formulas(const LinearState& st, const std::map<std::string, int>& lines,
                                                const std::map<std::string, Formula>& args) {
  std::map<std::string, Formula> out = args;
  for (const auto& [role, n] : lines) out[role] = st.line(n).formula;
  return out;
}

}  // namespace

std::vector<std::pair<Formula, std::optional<Formula>>> LinearProof::assumption_candidates(
    const Enumerator& filter) const {
  std::vector<std::pair<Formula, std::optional<Formula>>> out;
  if (calc_->style == Style::Hilbert) return out;
  auto t = st_.target();
  if (!t) {
    // Inside a search for a contradiction: set out to prove an implication
    // that could be fed to an elimination.
    if (filter.negation) return out;
    for (const auto& u : st_.universe()) {
      if (!is_op(u, "->") || st_.citable_line_with(u) || st_.citable_line_with(u.operand(1))) continue;
      out.emplace_back(u.operand(1), u);
    }
    return out;
  }
  if (filter.negation) {
    if (!is_op(*t, "not")) out.emplace_back(negate(*t), std::nullopt);
  } else if (is_op(*t, "->")) {
    out.emplace_back(t->operand(1), std::nullopt);
  } else if (is_op(*t, "not")) {
    out.emplace_back(t->operand(1), std::nullopt);
  } else {
    // Each side of a disjunction in scope, toward the implication a
    // disjunction elimination would cite.
    for (const auto& l : st_.lines()) {
      if (!is_op(l.formula, "or") || !st_.citable(l.index)) continue;
      for (std::size_t side = 1; side <= 2; ++side) {
        Formula aim = Formula::compound("->", {l.formula.operand(side), *t});
        if (!st_.citable_line_with(aim)) out.emplace_back(l.formula.operand(side), aim);
      }
    }
  }
  if (filter.nocycle)
    std::erase_if(out, [&](const auto& c) { return st_.citable_line_with(c.first).has_value(); });
  return out;
}

std::vector<Assignment> LinearProof::applicable(const Rule& rule, const Enumerator& filter,
                                                std::optional<VertexId>) const {
  std::vector<Assignment> out;
  if (rule.style == Style::Backward) return out;
  const bool closing = rule.subproof == SubproofAction::CloseHypothesis || rule.subproof == SubproofAction::CloseStrict;
  if (filter.nocycle && !closing) {
    // Nothing more to do where the target is already derived.
    if (auto t = st_.target(); t && st_.citable_line_with(*t)) return out;
  }
  if (rule.subproof == SubproofAction::OpenHypothesis) {
    for (const auto& [f, aim] : assumption_candidates(filter)) {
      Assignment a;
      a.result = f;
      if (aim) a.args["goal"] = *aim;
      out.push_back(std::move(a));
    }
    return out;
  }
  if (rule.subproof == SubproofAction::OpenStrict) {
    auto t = st_.target();
    if (!t || !is_op(*t, "box")) return out;
    if (filter.nocycle) {
      const Subproof& cur = st_.subproofs()[static_cast<std::size_t>(st_.current())];
      if (cur.strict && cur.first_line > static_cast<int>(st_.lines().size())) return out;
    }
    out.push_back(Assignment{});
    return out;
  }
  if (rule.axiom) {
    for (const auto& u : st_.universe()) {
      std::map<std::string, Formula> b;
      if (!match_schema(*rule.axiom, u, b)) continue;
      if (filter.nocycle && st_.citable_line_with(u)) continue;
      Assignment a;
      a.args = std::move(b);
      a.result = u;
      out.push_back(std::move(a));
    }
    return out;
  }

  const Subproof& inner = st_.subproofs()[static_cast<std::size_t>(st_.current())];
  if (rule.subproof == SubproofAction::CloseHypothesis && (st_.current() == 0 || inner.strict || !inner.hypothesis))
    return out;
  if (rule.subproof == SubproofAction::CloseStrict && !inner.strict) return out;

  const FormulaSet& universe = st_.universe();
  FormulaSet sought;
  if (filter.sought) {
    for (const auto& t : st_.targets()) sought.insert(t);
    for (int id : st_.open_chain())
      if (const auto& aim = st_.subproofs()[static_cast<std::size_t>(id)].aim) sought.insert(*aim);
  }
  std::map<std::string, int> lines;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == rule.premises.size()) {
      if (rule.closed) {
        for (const auto& [role, n] : lines)
          if (!st_.line(n).deps.empty()) return;
      }
      auto bound = premise_formulas(st_, lines, {});
      FormulaSet results;
      if (rule.conclusion.empty()) {
        if (auto t = st_.target()) results.insert(*t);
      } else {
        Formula frame = rule.premises.empty() ? st_.goal() : st_.line(lines.at(rule.premises[0].role)).formula;
        RefContext ctx{frame, &universe, &bound};
        for (const auto& c : rule.conclusion) results.merge(c.eval(ctx));
      }
      for (const auto& f : results) {
        if (filter.subformula && !universe.contains(f)) continue;
        if (filter.sought && !sought.contains(f)) continue;
        if (filter.nocycle && st_.citable_line_with(f, closing ? 1 : 0)) continue;
        Assignment a;
        a.lines = lines;
        a.result = f;
        out.push_back(std::move(a));
      }
      return;
    }
    const auto& p = rule.premises[i];
    auto bound = premise_formulas(st_, lines, {});
    for (const auto& l : st_.lines()) {
      if (i == 0 && rule.subproof == SubproofAction::CloseHypothesis && l.index != *inner.hypothesis) continue;
      if (!st_.citable(l.index, rule.crosses_strict)) continue;
      RefContext ctx{l.formula, &universe, &bound};
      if (eval_ref(p.pattern, ctx).empty()) continue;
      lines[p.role] = l.index;
      go(i + 1);
    }
    lines.erase(p.role);
  };
  go(0);
  return out;
}

void LinearProof::derive(LinearState& st, const Rule& rule, const Assignment& a) const {
  const Style style = calc_->style;
  if (a.target) throw Error(Errc::NotApplicable, "linear rules take no target");

  if (rule.subproof == SubproofAction::OpenHypothesis) {
    Formula f;
    std::optional<Formula> aim;
    if (auto it = a.args.find("goal"); it != a.args.end()) aim = it->second;
    if (a.result) {
      f = *a.result;
    } else {
      auto cands = assumption_candidates({});
      if (cands.size() != 1) throw Error(Errc::InvalidConclusion, "rule " + rule.name + " needs a resultFormula");
      f = cands.front().first;
      if (!aim) aim = cands.front().second;
    }
    if (aim && (style == Style::Hilbert || !is_op(*aim, "->") || aim->operand(1) != f))
      throw Error(Errc::InvalidConclusion, "hypothesis " + show(f) + " is not the antecedent of " + show(*aim));
    if (style != Style::Hilbert) st.open_subproof(false);
    Line l;
    l.formula = f;
    l.rule = rule.name;
    l.hypothesis = true;
    int n = st.append(std::move(l));
    if (style != Style::Hilbert) st.set_hypothesis(n, aim);
    return;
  }
  if (rule.subproof == SubproofAction::OpenStrict) {
    st.open_subproof(true);
    return;
  }
  if (rule.axiom) {
    std::map<std::string, Formula> b = a.args;
    if (a.result && !match_schema(*rule.axiom, *a.result, b))
      throw Error(Errc::InvalidConclusion, show(*a.result) + " is not an instance of " + rule.name);
    for (const auto& mv : atoms_of(*rule.axiom))
      if (!b.contains(mv)) throw Error(Errc::UnboundArgument, "metavariable " + mv + " of " + rule.name + " is unbound");
    Formula inst = substitute(*rule.axiom, b);
    if (a.result && inst != *a.result)
      throw Error(Errc::InvalidConclusion, show(*a.result) + " is not the instance " + show(inst));
    Line l;
    l.formula = inst;
    l.rule = rule.name;
    st.append(std::move(l));
    return;
  }

  // Line rules.
  std::map<std::string, int> lines = a.lines;
  const Subproof inner = st.subproofs()[static_cast<std::size_t>(st.current())];
  if (rule.subproof == SubproofAction::CloseHypothesis) {
    if (st.current() == 0 || inner.strict || !inner.hypothesis)
      throw Error(Errc::ScopeError, "rule " + rule.name + " needs an open hypothesis subproof");
    const std::string& first = rule.premises.front().role;
    if (!lines.contains(first)) lines[first] = *inner.hypothesis;
    if (lines[first] != *inner.hypothesis)
      throw Error(Errc::ScopeError, "rule " + rule.name + " must discharge the innermost hypothesis, line " +
                                        std::to_string(*inner.hypothesis));
  }
  if (rule.subproof == SubproofAction::CloseStrict && !inner.strict)
    throw Error(Errc::ScopeError, "rule " + rule.name + " needs an open strict subproof");
  for (const auto& [role, n] : lines) {
    bool known = std::any_of(rule.premises.begin(), rule.premises.end(), [&](const auto& p) { return p.role == role; });
    if (!known) throw Error(Errc::NotApplicable, "rule " + rule.name + " has no premise " + role);
  }
  for (const auto& p : rule.premises) {
    if (!lines.contains(p.role)) throw Error(Errc::UnboundArgument, "premise " + p.role + " of " + rule.name + " is not cited");
    int n = lines[p.role];
    if (!st.has_line(n)) throw Error(Errc::ScopeError, "there is no line " + std::to_string(n));
    if (!st.citable(n, rule.crosses_strict))
      throw Error(Errc::ScopeError, "line " + std::to_string(n) + " is not in scope here");
  }

  const FormulaSet& base_universe = st.universe();
  auto patterns_hold = [&](const std::map<std::string, int>& ls) {
    std::map<std::string, int> so_far;
    for (const auto& p : rule.premises) {
      auto bound = premise_formulas(st, so_far, a.args);
      RefContext ctx{st.line(ls.at(p.role)).formula, &base_universe, &bound};
      if (eval_ref(p.pattern, ctx).empty()) return false;
      so_far[p.role] = ls.at(p.role);
    }
    return true;
  };
  if (!patterns_hold(lines)) {
    bool fixed = false;
    if (rule.symmetric) {
      auto swapped = lines;
      std::swap(swapped[rule.premises[0].role], swapped[rule.premises[1].role]);
      if (patterns_hold(swapped)) {
        lines = swapped;
        fixed = true;
      }
    }
    if (!fixed) {
      std::string cited;
      for (const auto& p : rule.premises) cited += " " + std::to_string(lines[p.role]);
      throw Error(style == Style::Hilbert ? Errc::NonMatchingMP : Errc::NotApplicable,
                  "lines" + cited + " do not fit the premises of " + rule.name);
    }
  }

  std::set<int> deps;
  for (const auto& [role, n] : lines) deps.insert(st.line(n).deps.begin(), st.line(n).deps.end());
  if (rule.closed && !deps.empty())
    throw Error(Errc::NecessitationUnderHypothesis,
                "rule " + rule.name + " cites a line resting on hypothesis line " + std::to_string(*deps.begin()));

  Formula result;
  if (rule.conclusion.empty()) {
    if (!a.result) {
      auto t = st.target();
      if (!t) throw Error(Errc::InvalidConclusion, "rule " + rule.name + " needs a resultFormula");
      result = *t;
    } else {
      result = *a.result;
    }
  } else {
    FormulaSet universe = base_universe;
    if (a.result) universe.merge(subformulas(*a.result));
    auto bound = premise_formulas(st, lines, a.args);
    Formula frame = st.line(lines.at(rule.premises.front().role)).formula;
    RefContext ctx{frame, &universe, &bound};
    FormulaSet results;
    for (const auto& c : rule.conclusion) results.merge(c.eval(ctx));
    if (a.result) {
      if (!results.contains(*a.result))
        throw Error(Errc::InvalidConclusion, show(*a.result) + " does not follow by " + rule.name);
      result = *a.result;
    } else if (results.size() == 1) {
      result = *results.begin();
    } else {
      throw Error(Errc::InvalidConclusion, "rule " + rule.name + " allows " + std::to_string(results.size()) +
                                               " conclusions here; supply resultFormula");
    }
  }

  if (rule.subproof == SubproofAction::CloseHypothesis) {
    deps.erase(*inner.hypothesis);
    st.close_subproof();
  } else if (rule.subproof == SubproofAction::CloseStrict) {
    st.close_subproof();
  }
  Line l;
  l.formula = result;
  l.rule = rule.name;
  for (const auto& p : rule.premises) l.cites.emplace_back(p.role, lines.at(p.role));
  l.deps = std::move(deps);
  st.append(std::move(l));
}

void LinearProof::apply(const Rule& rule, const Assignment& a) {
  check_style(rule);
  if (calc_->style == Style::Fitch && rule.style == Style::Hilbert && !rule.axiom)
    throw Error(Errc::WrongStyle, "rule " + rule.name + " is a hilbert rule");
  for (const auto& [k, f] : a.args) {
    if (!rule.axiom && rule.premises.empty() && !(rule.subproof == SubproofAction::OpenHypothesis && k == "goal"))
      throw Error(Errc::NotApplicable, "rule " + rule.name + " takes no argument " + k);
  }
  LinearState next = st_;
  derive(next, rule, a);
  history_.push_back(std::move(st_));
  st_ = std::move(next);
  steps_.push_back(Step{rule.name, a});
}

void LinearProof::undo() {
  if (history_.empty()) throw Error(Errc::NothingToUndo, "no rule application to undo");
  st_ = std::move(history_.back());
  history_.pop_back();
  if (!steps_.empty()) steps_.pop_back();
}

nlohmann::json LinearProof::to_document() const {
  nlohmann::json doc = st_.to_graph().to_document();
  doc["system"] = calc_->name;
  doc["rootGoal"] = to_sexpr(st_.goal());
  doc["style"] = std::string(style_name(calc_->style));
  auto steps = nlohmann::json::array();
  for (const auto& s : steps_) {
    nlohmann::json j = s.assignment.to_json();
    j["rule"] = s.rule;
    steps.push_back(std::move(j));
  }
  doc["steps"] = steps;
  return doc;
}

nlohmann::json LinearProof::snapshot() const {
  const auto& t = calc_->table;
  nlohmann::json j;
  j["style"] = std::string(style_name(calc_->style));
  j["system"] = calc_->name;
  j["rootGoal"] = formula_json(t, st_.goal());
  auto rep = check();
  j["complete"] = rep.complete;
  j["summary"] = rep.summary();
  j["depth"] = st_.depth();
  auto target = st_.target();
  j["target"] = target ? formula_json(t, *target) : nlohmann::json(nullptr);
  auto lines = nlohmann::json::array();
  for (const auto& l : st_.lines()) {
    auto cites = nlohmann::json::array();
    for (const auto& [role, n] : l.cites) cites.push_back({{"role", role}, {"line", n}});
    lines.push_back({{"index", l.index},
                     {"formula", formula_json(t, l.formula)},
                     {"rule", l.rule},
                     {"cites", cites},
                     {"depth", l.depth},
                     {"subproof", l.subproof},
                     {"hypothesis", l.hypothesis},
                     {"deps", l.deps},
                     {"citable", st_.citable(l.index)}});
  }
  j["lines"] = lines;
  auto open = nlohmann::json::array();
  for (std::size_t k = 1; k < st_.open_chain().size(); ++k) {
    const Subproof& sp = st_.subproofs()[static_cast<std::size_t>(st_.open_chain()[k])];
    open.push_back({{"id", sp.id},
                    {"strict", sp.strict},
                    {"firstLine", sp.first_line},
                    {"hypothesis", sp.hypothesis ? nlohmann::json(*sp.hypothesis) : nlohmann::json(nullptr)}});
  }
  j["openSubproofs"] = open;
  j["steps"] = steps_.size();
  return j;
}

bool LinearProof::same_state(const Proof& other) const {
  auto* o = dynamic_cast<const LinearProof*>(&other);
  return o && st_ == o->st_;
}

}  // namespace glf
