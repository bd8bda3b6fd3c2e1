#include "glf/refspec.hpp"

#include <algorithm>
#include <iterator>

#include "glf/syntax.hpp"

namespace glf {

bool Constraint::accepts(const Formula& f) const {
  if (op && (f.is_atom() || f.symbol() != *op)) return false;
  if (atom && (!f.is_atom() || f.symbol() != *atom)) return false;
  return true;
}

RefSpec RefSpec::make(Kind k, Constraint c, std::optional<int> operand, std::string arg) {
  RefSpec r;
  r.kind_ = k;
  r.constraint_ = std::move(c);
  r.operand_ = operand;
  r.arg_ = std::move(arg);
  return r;
}

RefSpec RefSpec::identity(Constraint c) { return make(Kind::Identity, std::move(c), std::nullopt); }
RefSpec RefSpec::super_of(Constraint c, std::optional<int> operand) { return make(Kind::SuperOf, std::move(c), operand); }
RefSpec RefSpec::sub_of(Constraint c, std::optional<int> operand) { return make(Kind::SubOf, std::move(c), operand); }
RefSpec RefSpec::arg(std::string name) { return make(Kind::Arg, {}, std::nullopt, std::move(name)); }

RefSpec RefSpec::both(RefSpec a, RefSpec b) {
  RefSpec r = make(Kind::Both, {}, std::nullopt);
  r.lhs_ = std::make_shared<const RefSpec>(std::move(a));
  r.rhs_ = std::make_shared<const RefSpec>(std::move(b));
  return r;
}

RefSpec RefSpec::either(RefSpec a, RefSpec b) {
  RefSpec r = make(Kind::Either, {}, std::nullopt);
  r.lhs_ = std::make_shared<const RefSpec>(std::move(a));
  r.rhs_ = std::make_shared<const RefSpec>(std::move(b));
  return r;
}

RefSpec RefSpec::and_then(RefSpec a, RefSpec b) {
  RefSpec r = make(Kind::And, {}, std::nullopt);
  r.lhs_ = std::make_shared<const RefSpec>(std::move(a));
  r.rhs_ = std::make_shared<const RefSpec>(std::move(b));
  return r;
}

RefSpec RefSpec::that(RefSpec inner) {
  RefSpec r = make(Kind::That, {}, std::nullopt);
  r.lhs_ = std::make_shared<const RefSpec>(std::move(inner));
  return r;
}

namespace {

std::string kind_name(RefSpec::Kind k) {
  switch (k) {
    case RefSpec::Kind::Identity: return "Identity";
    case RefSpec::Kind::SuperOf: return "SuperOf";
    case RefSpec::Kind::SubOf: return "SubOf";
    case RefSpec::Kind::Both: return "Both";
    case RefSpec::Kind::Either: return "Either";
    case RefSpec::Kind::And: return "And";
    case RefSpec::Kind::That: return "That";
    case RefSpec::Kind::Arg: return "Arg";
  }
  return "?";
}

FormulaSet filtered(FormulaSet in, const Constraint& c) {
  if (c.empty()) return in;
  std::erase_if(in, [&](const Formula& f) { return !c.accepts(f); });
  return in;
}

}  // namespace

std::string RefSpec::to_string() const {
  std::string name = kind_name(kind_);
  switch (kind_) {
    case Kind::Both:
    case Kind::Either:
    case Kind::And:
      return name + "(" + lhs_->to_string() + ", " + rhs_->to_string() + ")";
    case Kind::That:
      return name + "(" + lhs_->to_string() + ")";
    case Kind::Arg:
      return name + "(" + arg_ + ")";
    default:
      break;
  }
  std::vector<std::string> parts;
  if (constraint_.op) parts.push_back("operator=" + *constraint_.op);
  if (constraint_.atom) parts.push_back("atom=" + *constraint_.atom);
  if (operand_) parts.push_back("operand=" + std::to_string(*operand_));
  if (parts.empty()) return name;
  std::string out = name + "(";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out + ")";
}

RefSpec RefSpec::from_term(const syntax::Term& t) {
  using syntax::Term;
  if (!t.is(Term::Kind::Ident) && !t.is(Term::Kind::Call)) syntax::fail_at(t, "expected a formula reference");
  const std::string& name = t.text;
  auto binary = [&](auto ctor) {
    if (t.items.size() != 2 || !t.named.empty()) syntax::fail_at(t, name + " takes two references");
    return ctor(from_term(t.items[0]), from_term(t.items[1]));
  };
  if (name == "Both") return binary(&RefSpec::both);
  if (name == "Either") return binary(&RefSpec::either);
  if (name == "And") return binary(&RefSpec::and_then);
  if (name == "That") {
    if (t.items.size() != 1 || !t.named.empty()) syntax::fail_at(t, "That takes one reference");
    return that(from_term(t.items[0]));
  }
  if (name == "Arg") {
    if (t.items.size() != 1 || !t.named.empty()) syntax::fail_at(t, "Arg takes one argument name");
    return arg(t.items[0].word());
  }
  Kind k;
  if (name == "Identity") k = Kind::Identity;
  else if (name == "SuperOf") k = Kind::SuperOf;
  else if (name == "SubOf") k = Kind::SubOf;
  else syntax::fail_at(t, "unknown reference combinator '" + name + "'");
  if (!t.items.empty()) syntax::fail_at(t, name + " takes only named parameters");
  Constraint c;
  std::optional<int> operand;
  for (const auto& [key, v] : t.named) {
    if (key == "operator") c.op = v.word();
    else if (key == "atom") c.atom = v.word();
    else if (key == "operand") {
      if (!v.is(Term::Kind::Int)) syntax::fail_at(v, "operand must be an integer");
      operand = static_cast<int>(v.number);
    } else {
      syntax::fail_at(v, "unknown parameter '" + key + "'");
    }
  }
  return make(k, std::move(c), operand);
}

RefSpec RefSpec::parse(std::string_view text) { return from_term(syntax::parse_term(text)); }

FormulaSet eval_ref(const RefSpec& spec, const RefContext& ctx) {
  using Kind = RefSpec::Kind;
  const Formula& f = ctx.frame;
  switch (spec.kind()) {
    case Kind::Identity:
      return filtered({f}, spec.constraint());
    case Kind::SubOf: {
      if (auto i = spec.operand()) {
        if (f.is_atom() || *i < 1 || static_cast<std::size_t>(*i) > f.arity()) return {};
        return filtered({f.operand(static_cast<std::size_t>(*i))}, spec.constraint());
      }
      return filtered(subformulas(f), spec.constraint());
    }
    case Kind::SuperOf: {
      if (!ctx.universe) throw Error(Errc::InvalidRef, "SuperOf evaluated without a universe");
      FormulaSet out;
      for (const auto& g : *ctx.universe) {
        if (!spec.constraint().accepts(g)) continue;
        if (auto i = spec.operand()) {
          if (!g.is_atom() && *i >= 1 && static_cast<std::size_t>(*i) <= g.arity() &&
              g.operand(static_cast<std::size_t>(*i)) == f)
            out.insert(g);
        } else if (is_subformula(f, g)) {
          out.insert(g);
        }
      }
      return out;
    }
    case Kind::Both: {
      FormulaSet a = eval_ref(spec.lhs(), ctx);
      if (a.empty()) return a;
      FormulaSet b = eval_ref(spec.rhs(), ctx);
      FormulaSet out;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
      return out;
    }
    case Kind::Either: {
      FormulaSet a = eval_ref(spec.lhs(), ctx);
      a.merge(eval_ref(spec.rhs(), ctx));
      return a;
    }
    case Kind::And: {
      FormulaSet out;
      for (const auto& g : eval_ref(spec.lhs(), ctx)) {
        RefContext inner = ctx;
        inner.frame = g;
        out.merge(eval_ref(spec.rhs(), inner));
      }
      return out;
    }
    case Kind::That:
      return eval_ref(spec.lhs(), ctx).empty() ? FormulaSet{} : FormulaSet{f};
    case Kind::Arg: {
      if (ctx.args) {
        if (auto it = ctx.args->find(spec.arg_name()); it != ctx.args->end()) return {it->second};
      }
      throw Error(Errc::UnboundArgument, "argument '" + spec.arg_name() + "' is not bound");
    }
  }
  return {};
}

std::vector<RefIssue> validate_ref(const RefSpec& spec, const std::vector<std::string>& rule_args) {
  using Kind = RefSpec::Kind;
  std::vector<RefIssue> out;
  auto visit = [&](const RefSpec& r, auto& self) -> void {
    if (r.operand()) {
      if (r.kind() != Kind::SubOf && r.kind() != Kind::SuperOf)
        out.push_back({RefIssue::Kind::MisplacedOperandIndex, r.to_string()});
      else if (*r.operand() < 1)
        out.push_back({RefIssue::Kind::BadOperandIndex, r.to_string()});
    }
    switch (r.kind()) {
      case Kind::Both:
      case Kind::Either:
      case Kind::And:
        self(r.lhs(), self);
        self(r.rhs(), self);
        break;
      case Kind::That:
        self(r.lhs(), self);
        break;
      case Kind::Arg:
        if (std::find(rule_args.begin(), rule_args.end(), r.arg_name()) == rule_args.end())
          out.push_back({RefIssue::Kind::UnboundArgument, r.arg_name()});
        break;
      default:
        break;
    }
  };
  visit(spec, visit);
  return out;
}

std::string_view ref_issue_name(RefIssue::Kind k) {
  switch (k) {
    case RefIssue::Kind::UnboundArgument: return "UnboundArgument";
    case RefIssue::Kind::MisplacedOperandIndex: return "MisplacedOperandIndex";
    case RefIssue::Kind::BadOperandIndex: return "BadOperandIndex";
  }
  return "?";
}

}  // namespace glf
