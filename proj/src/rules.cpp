#include "glf/rules.hpp"

#include <algorithm>
#include <set>

#include "glf/syntax.hpp"

namespace glf {

using syntax::Term;

std::string_view style_name(Style s) {
  switch (s) {
    case Style::Backward: return "backward";
    case Style::Fitch: return "fitch";
    case Style::Hilbert: return "hilbert";
  }
  return "?";
}

std::optional<Style> parse_style(std::string_view s) {
  if (s == "backward") return Style::Backward;
  if (s == "fitch") return Style::Fitch;
  if (s == "hilbert") return Style::Hilbert;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Schemas

Formula substitute(const Formula& f, const std::map<std::string, Formula>& bindings) {
  if (f.is_atom()) {
    auto it = bindings.find(f.symbol());
    return it == bindings.end() ? f : it->second;
  }
  std::vector<Formula> ops;
  ops.reserve(f.arity());
  for (const auto& o : f.operands()) ops.push_back(substitute(o, bindings));
  return Formula::compound(f.symbol(), std::move(ops));
}

bool match_schema(const Formula& schema, const Formula& instance, std::map<std::string, Formula>& bindings) {
  if (schema.is_atom()) {
    auto [it, fresh] = bindings.emplace(schema.symbol(), instance);
    return fresh || it->second == instance;
  }
  if (instance.is_atom() || instance.symbol() != schema.symbol() || instance.arity() != schema.arity()) return false;
  for (std::size_t i = 1; i <= schema.arity(); ++i)
    if (!match_schema(schema.operand(i), instance.operand(i), bindings)) return false;
  return true;
}

std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  for (const auto& s : subformulas(f))
    if (s.is_atom()) out.insert(s.symbol());
  return out;
}

FormulaExpr FormulaExpr::ref(RefSpec r) {
  FormulaExpr e;
  e.ref_ = std::move(r);
  return e;
}

FormulaExpr FormulaExpr::schema(Formula f) {
  FormulaExpr e;
  e.atoms_ = atoms_of(f);
  e.schema_ = std::move(f);
  return e;
}

FormulaSet FormulaExpr::eval(const RefContext& ctx) const {
  if (ref_) return eval_ref(*ref_, ctx);
  for (const auto& a : atoms_) {
    if (!ctx.args || !ctx.args->contains(a))
      throw Error(Errc::UnboundArgument, "schema atom '" + a + "' is not bound");
  }
  return {substitute(*schema_, *ctx.args)};
}

std::vector<std::string> FormulaExpr::names_used() const {
  std::vector<std::string> out;
  if (schema_) {
    auto atoms = atoms_of(*schema_);
    out.assign(atoms.begin(), atoms.end());
    return out;
  }
  auto visit = [&](const RefSpec& r, auto& self) -> void {
    switch (r.kind()) {
      case RefSpec::Kind::Both:
      case RefSpec::Kind::Either:
      case RefSpec::Kind::And:
        self(r.lhs(), self);
        self(r.rhs(), self);
        break;
      case RefSpec::Kind::That:
        self(r.lhs(), self);
        break;
      case RefSpec::Kind::Arg:
        out.push_back(r.arg_name());
        break;
      default:
        break;
    }
  };
  visit(*ref_, visit);
  return out;
}

std::string FormulaExpr::to_string() const {
  if (schema_) return "Schema(\"" + to_sexpr(*schema_) + "\")";
  return ref_->to_string();
}

std::string ArgSource::to_string() const {
  auto with = [&](std::string name) {
    std::vector<std::string> parts;
    if (constraint.op) parts.push_back("operator=" + *constraint.op);
    if (constraint.atom) parts.push_back("atom=" + *constraint.atom);
    if (parts.empty()) return name;
    std::string out = name + "(";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    return out + ")";
  };
  switch (kind) {
    case Kind::Ref: return ref.to_string();
    case Kind::Universe: return with("Universe");
    case Kind::Hypotheses: return with("Hypotheses");
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Rules

std::vector<std::string> Rule::arg_names() const {
  std::vector<std::string> out;
  for (const auto& [n, src] : args) out.push_back(n);
  return out;
}

std::size_t Rule::premise_count() const { return style == Style::Backward ? branches.size() : premises.size(); }

namespace {

void check_names(const std::string& where, const std::vector<std::string>& used,
                 const std::vector<std::string>& known, std::vector<std::string>& out) {
  for (const auto& n : used)
    if (std::find(known.begin(), known.end(), n) == known.end())
      out.push_back(where + ": UnboundArgument '" + n + "'");
}

void check_ref(const std::string& where, const RefSpec& r, const std::vector<std::string>& known,
               std::vector<std::string>& out) {
  for (const auto& issue : validate_ref(r, known))
    out.push_back(where + ": " + std::string(ref_issue_name(issue.kind)) + " '" + issue.detail + "'");
}

void check_expr(const std::string& where, const FormulaExpr& e, const std::vector<std::string>& known,
                std::vector<std::string>& out) {
  if (e.is_schema()) check_names(where, e.names_used(), known, out);
  else check_ref(where, e.refspec(), known, out);
}

void check_operators(const std::string& where, const Formula& f, const OperatorTable& table,
                     std::vector<std::string>& out) {
  for (const auto& s : subformulas(f)) {
    if (s.is_atom()) continue;
    const Operator* op = table.find(s.symbol());
    if (!op) out.push_back(where + ": unknown operator " + s.symbol());
    else if (static_cast<std::size_t>(op->arity) != s.arity()) out.push_back(where + ": arity of " + s.symbol());
  }
}

}  // namespace

std::vector<std::string> Rule::problems(const OperatorTable& table) const {
  std::vector<std::string> out;
  if (name.empty()) out.push_back("rule without a name");
  const std::string where = "rule " + name;
  auto names = arg_names();
  {
    std::set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second) out.push_back(where + ": duplicate argument " + n);
  }
  std::vector<std::string> earlier;
  for (const auto& [n, src] : args) {
    if (src.kind == ArgSource::Kind::Ref) check_ref(where + " argument " + n, src.ref, earlier, out);
    earlier.push_back(n);
  }
  if (style == Style::Backward) {
    if (!premises.empty() || !conclusion.empty() || subproof != SubproofAction::None || axiom)
      out.push_back(where + ": backward rules take branches, not premises or conclusions");
    if (leaf_hypothesis && !branches.empty()) out.push_back(where + ": a leaf rule has no branches");
    for (const auto& b : branches) {
      check_expr(where + " branch goal", b.goal, names, out);
      if (b.goal.is_schema()) check_operators(where, b.goal.schema_formula(), table, out);
      for (const auto& h : b.hypotheses) {
        check_expr(where + " hypothesis", h, names, out);
        if (h.is_schema()) check_operators(where, h.schema_formula(), table, out);
      }
    }
    return out;
  }
  if (!branches.empty() || leaf_hypothesis) out.push_back(where + ": linear rules take premises, not branches");
  std::vector<std::string> roles;
  for (const auto& p : premises) {
    if (std::find(roles.begin(), roles.end(), p.role) != roles.end())
      out.push_back(where + ": duplicate premise role " + p.role);
    auto known = roles;
    known.insert(known.end(), names.begin(), names.end());
    check_ref(where + " premise " + p.role, p.pattern, known, out);
    roles.push_back(p.role);
  }
  roles.insert(roles.end(), names.begin(), names.end());
  for (const auto& c : conclusion) {
    check_expr(where + " conclusion", c, roles, out);
    if (c.is_schema()) check_operators(where, c.schema_formula(), table, out);
  }
  if (subproof == SubproofAction::CloseHypothesis && premises.empty())
    out.push_back(where + ": closing a hypothesis needs the hypothesis as first premise");
  if ((subproof == SubproofAction::OpenHypothesis || subproof == SubproofAction::OpenStrict) && !premises.empty())
    out.push_back(where + ": opening rules cite no lines");
  if (symmetric && premises.size() != 2) out.push_back(where + ": symmetric rules have two premises");
  if (axiom) {
    if (style != Style::Hilbert) out.push_back(where + ": axioms belong to hilbert systems");
    if (!premises.empty()) out.push_back(where + ": axioms cite no lines");
    check_operators(where, *axiom, table, out);
  }
  return out;
}

nlohmann::json Rule::describe(const OperatorTable& table) const {
  nlohmann::json j;
  j["name"] = name;
  j["style"] = std::string(style_name(style));
  if (!description.empty()) j["description"] = description;
  j["premiseCount"] = premise_count();
  auto arr = nlohmann::json::array();
  for (const auto& [n, src] : args) arr.push_back({{"name", n}, {"source", src.to_string()}});
  j["args"] = arr;
  if (style == Style::Backward) {
    if (leaf_hypothesis) j["leaf"] = "hypothesis";
    auto bs = nlohmann::json::array();
    for (const auto& b : branches) {
      auto hs = nlohmann::json::array();
      for (const auto& h : b.hypotheses) hs.push_back(h.to_string());
      bs.push_back({{"role", b.role}, {"goal", b.goal.to_string()}, {"newHypotheses", hs}});
    }
    j["branches"] = bs;
    return j;
  }
  auto ps = nlohmann::json::array();
  for (const auto& p : premises) ps.push_back({{"role", p.role}, {"pattern", p.pattern.to_string()}});
  j["premises"] = ps;
  auto cs = nlohmann::json::array();
  for (const auto& c : conclusion) cs.push_back(c.to_string());
  j["conclusion"] = cs;
  j["needsResult"] = conclusion.empty() && !axiom &&
                     subproof != SubproofAction::OpenStrict;
  switch (subproof) {
    case SubproofAction::OpenHypothesis: j["opens"] = "hypothesis"; break;
    case SubproofAction::OpenStrict: j["opens"] = "strict"; break;
    case SubproofAction::CloseHypothesis: j["closes"] = "hypothesis"; break;
    case SubproofAction::CloseStrict: j["closes"] = "strict"; break;
    case SubproofAction::None: break;
  }
  if (crosses_strict) j["crossesStrict"] = true;
  if (closed) j["closed"] = true;
  if (axiom) {
    j["axiom"] = to_sexpr(*axiom);
    j["axiomInfix"] = render(table, *axiom, RenderStyle::Infix);
    auto mv = nlohmann::json::array();
    for (const auto& a : atoms_of(*axiom)) mv.push_back(a);
    j["metavariables"] = mv;
  }
  return j;
}

namespace {

bool boolean(const Term& t) {
  if (t.is_word("true")) return true;
  if (t.is_word("false")) return false;
  syntax::fail_at(t, "expected true or false");
}

FormulaExpr expr_from(const Term& t, const OperatorTable& table) {
  if (t.is_call("Schema")) {
    if (t.items.size() != 1 || !t.items[0].is(Term::Kind::String)) syntax::fail_at(t, "Schema takes one formula string");
    return FormulaExpr::schema(parse_formula(table, t.items[0].text));
  }
  return FormulaExpr::ref(RefSpec::from_term(t));
}

std::vector<FormulaExpr> exprs_from(const Term& t, const OperatorTable& table) {
  std::vector<FormulaExpr> out;
  if (t.is(Term::Kind::List)) {
    for (const auto& it : t.items) out.push_back(expr_from(it, table));
  } else {
    out.push_back(expr_from(t, table));
  }
  return out;
}

Constraint constraint_from(const Term& t) {
  Constraint c;
  if (!t.items.empty()) syntax::fail_at(t, "expected named parameters");
  for (const auto& [k, v] : t.named) {
    if (k == "operator") c.op = v.word();
    else if (k == "atom") c.atom = v.word();
    else syntax::fail_at(v, "unknown parameter '" + k + "'");
  }
  return c;
}

ArgSource source_from(const Term& t) {
  ArgSource s;
  if (t.is_word("Universe") || t.is_call("Universe")) {
    s.kind = ArgSource::Kind::Universe;
    if (t.is(Term::Kind::Call)) s.constraint = constraint_from(t);
  } else if (t.is_word("Hypotheses") || t.is_call("Hypotheses")) {
    s.kind = ArgSource::Kind::Hypotheses;
    if (t.is(Term::Kind::Call)) s.constraint = constraint_from(t);
  } else {
    s.ref = RefSpec::from_term(t);
  }
  return s;
}

const Term& list_of(const Term& t) {
  if (!t.is(Term::Kind::List)) syntax::fail_at(t, "expected a list");
  return t;
}

const Term& bound(const Term& t) {
  if (!t.is(Term::Kind::Bind)) syntax::fail_at(t, "expected \"name\" =: value");
  return t;
}

}  // namespace

Rule Rule::from_term(const Term& t, const OperatorTable& table, Style default_style, std::string name) {
  if (!t.is_call("Rule")) syntax::fail_at(t, "expected Rule(...)");
  if (!t.items.empty()) syntax::fail_at(t, "Rule takes only named fields");
  Rule r;
  r.name = std::move(name);
  r.style = default_style;
  for (const auto& [key, v] : t.named) {
    if (key == "name") {
      r.name = v.word();
    } else if (key == "style") {
      auto s = parse_style(v.word());
      if (!s) syntax::fail_at(v, "unknown style");
      r.style = *s;
    } else if (key == "description") {
      r.description = v.word();
    } else if (key == "args") {
      for (const auto& a : list_of(v).items) r.args.emplace_back(bound(a).text, source_from(a.items.front()));
    } else if (key == "branches") {
      for (const auto& b : list_of(v).items) {
        if (!b.is_call("NewBranch")) syntax::fail_at(b, "expected NewBranch(...)");
        BranchSpec spec;
        bool has_goal = false;
        for (const auto& [bk, bv] : b.named) {
          if (bk == "goal") {
            spec.goal = expr_from(bv, table);
            has_goal = true;
          } else if (bk == "newHypotheses") {
            for (const auto& h : list_of(bv).items) spec.hypotheses.push_back(expr_from(h, table));
          } else if (bk == "role") {
            spec.role = bv.word();
          } else {
            syntax::fail_at(bv, "unknown NewBranch field '" + bk + "'");
          }
        }
        if (!has_goal) syntax::fail_at(b, "NewBranch needs a goal");
        if (spec.role.empty()) spec.role = "premise" + std::to_string(r.branches.size() + 1);
        r.branches.push_back(std::move(spec));
      }
    } else if (key == "leaf") {
      if (v.word() != "hypothesis") syntax::fail_at(v, "only hypothesis leaves exist");
      r.leaf_hypothesis = true;
    } else if (key == "premises") {
      for (const auto& p : list_of(v).items) r.premises.push_back({bound(p).text, RefSpec::from_term(p.items.front())});
    } else if (key == "conclusion") {
      r.conclusion = exprs_from(v, table);
    } else if (key == "opens") {
      std::string w = v.word();
      if (w == "hypothesis") r.subproof = SubproofAction::OpenHypothesis;
      else if (w == "strict") r.subproof = SubproofAction::OpenStrict;
      else syntax::fail_at(v, "opens takes hypothesis or strict");
    } else if (key == "closes") {
      std::string w = v.word();
      if (w == "hypothesis") r.subproof = SubproofAction::CloseHypothesis;
      else if (w == "strict") r.subproof = SubproofAction::CloseStrict;
      else syntax::fail_at(v, "closes takes hypothesis or strict");
    } else if (key == "crossesStrict") {
      r.crosses_strict = boolean(v);
    } else if (key == "closed") {
      r.closed = boolean(v);
    } else if (key == "symmetric") {
      r.symmetric = boolean(v);
    } else {
      syntax::fail_at(v, "unknown Rule field '" + key + "'");
    }
  }
  if (r.name.empty()) syntax::fail_at(t, "rule needs a name");
  return r;
}

Rule Rule::axiom_from_term(const Term& t, const OperatorTable& table, std::string name) {
  if (!t.is_call("Axiom")) syntax::fail_at(t, "expected Axiom(...)");
  Rule r;
  r.name = std::move(name);
  r.style = Style::Hilbert;
  const Term* schema = t.items.empty() ? nullptr : &t.items.front();
  for (const auto& [key, v] : t.named) {
    if (key == "name") r.name = v.word();
    else if (key == "schema") schema = &v;
    else if (key == "description") r.description = v.word();
    else syntax::fail_at(v, "unknown Axiom field '" + key + "'");
  }
  if (!schema || !schema->is(Term::Kind::String)) syntax::fail_at(t, "Axiom needs a schema string");
  if (r.name.empty()) syntax::fail_at(t, "axiom needs a name");
  r.axiom = parse_formula(table, schema->text);
  return r;
}

// ---------------------------------------------------------------------------
// Enumerators and assignments

std::string Enumerator::to_string() const {
  std::vector<std::string> w;
  if (nocycle) w.push_back("nocycle");
  if (hypotheses) w.push_back("hyps");
  if (negation) w.push_back("negation");
  if (subformula) w.push_back("sub");
  if (sought) w.push_back("goal");
  std::string out = "[";
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? ", " : "") + w[i];
  return out + "]";
}

Enumerator Enumerator::from_term(const Term& t) {
  Enumerator e;
  for (const auto& it : list_of(t).items) {
    std::string w = it.word();
    if (w == "nocycle") e.nocycle = true;
    else if (w == "hyps") e.hypotheses = true;
    else if (w == "negation") e.negation = true;
    else if (w == "sub") e.subformula = true;
    else if (w == "goal") e.sought = true;
    else syntax::fail_at(it, "unknown enumerator filter '" + w + "'");
  }
  return e;
}

nlohmann::json Assignment::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (target) j["target"] = std::to_string(target->value);
  nlohmann::json a = nlohmann::json::object();
  for (const auto& [k, f] : args) a[k] = to_sexpr(f);
  for (const auto& [k, n] : lines) a[k] = n;
  j["args"] = a;
  if (result) j["resultFormula"] = to_sexpr(*result);
  return j;
}

Assignment Assignment::from_json(const nlohmann::json& j, const OperatorTable& table) {
  Assignment a;
  if (!j.is_object()) throw Error(Errc::SyntaxError, "assignment must be an object");
  if (j.contains("target") && !j["target"].is_null()) {
    const auto& t = j["target"];
    if (t.is_string()) {
      const std::string& s = t.get_ref<const std::string&>();
      if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit)) throw Error(Errc::SyntaxError, "bad target id");
      a.target = graph::VertexId{std::stoull(s)};
    } else if (t.is_number_unsigned()) {
      a.target = graph::VertexId{t.get<std::uint64_t>()};
    } else {
      throw Error(Errc::SyntaxError, "bad target id");
    }
  }
  if (j.contains("args") && !j["args"].is_null()) {
    if (!j["args"].is_object()) throw Error(Errc::SyntaxError, "args must be an object");
    for (const auto& [k, v] : j["args"].items()) {
      if (v.is_string()) a.args[k] = parse_formula(table, v.get<std::string>());
      else if (v.is_number_integer()) a.lines[k] = v.get<int>();
      else throw Error(Errc::SyntaxError, "argument " + k + " must be a formula string or a line number");
    }
  }
  if (j.contains("resultFormula") && !j["resultFormula"].is_null()) {
    if (!j["resultFormula"].is_string()) throw Error(Errc::SyntaxError, "resultFormula must be a string");
    a.result = parse_formula(table, j["resultFormula"].get<std::string>());
  }
  return a;
}

const Rule* Calculus::find_rule(std::string_view rule) const {
  for (const auto& r : rules)
    if (r->name == rule) return r.get();
  return nullptr;
}

const Rule& Calculus::rule(std::string_view rule) const {
  if (const Rule* r = find_rule(rule)) return *r;
  throw Error(Errc::UnknownRule, "system " + name + " has no rule '" + std::string(rule) + "'");
}

}  // namespace glf
