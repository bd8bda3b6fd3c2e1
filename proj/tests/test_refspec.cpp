#include <functional>
#include <random>

#include "glf/refspec.hpp"
#include "oracles.hpp"
#include "testing.hpp"

using namespace glf;
using oracle::Tree;

namespace {

OperatorTable table() {
  return OperatorTable({{"->", 2, true, ""}, {"and", 2, true, ""}, {"or", 2, true, ""}, {"not", 1, false, ""}});
}

// A reference as plain data, evaluated by set definitions over trees.
struct Ref {
  std::string kind;
  std::string op, atom;
  int operand = 0;
  std::string arg;
  std::vector<Ref> kids;
};

bool accepts(const Ref& r, const Tree& t) {
  if (!r.op.empty() && (t.kids.empty() || t.head != r.op)) return false;
  if (!r.atom.empty() && (!t.kids.empty() || t.head != r.atom)) return false;
  return true;
}

bool contains_subtree(const Tree& big, const Tree& small) {
  if (big == small) return true;
  for (const auto& k : big.kids)
    if (contains_subtree(k, small)) return true;
  return false;
}

std::set<Tree> eval(const Ref& r, const Tree& frame, const std::set<Tree>& universe, const std::map<std::string, Tree>& args) {
  std::set<Tree> out;
  if (r.kind == "Identity") {
    if (accepts(r, frame)) out.insert(frame);
  } else if (r.kind == "SubOf") {
    if (r.operand) {
      if (r.operand <= static_cast<int>(frame.kids.size()) && accepts(r, frame.kids[r.operand - 1]))
        out.insert(frame.kids[r.operand - 1]);
    } else {
      std::set<Tree> all;
      oracle::collect_subtrees(frame, all);
      for (const auto& t : all)
        if (accepts(r, t)) out.insert(t);
    }
  } else if (r.kind == "SuperOf") {
    for (const auto& g : universe) {
      if (!accepts(r, g)) continue;
      bool ok = r.operand ? (r.operand <= static_cast<int>(g.kids.size()) && g.kids[r.operand - 1] == frame)
                          : contains_subtree(g, frame);
      if (ok) out.insert(g);
    }
  } else if (r.kind == "Both") {
    auto a = eval(r.kids[0], frame, universe, args), b = eval(r.kids[1], frame, universe, args);
    for (const auto& t : a)
      if (b.count(t)) out.insert(t);
  } else if (r.kind == "Either") {
    out = eval(r.kids[0], frame, universe, args);
    for (const auto& t : eval(r.kids[1], frame, universe, args)) out.insert(t);
  } else if (r.kind == "And") {
    for (const auto& m : eval(r.kids[0], frame, universe, args))
      for (const auto& t : eval(r.kids[1], m, universe, args)) out.insert(t);
  } else if (r.kind == "That") {
    if (!eval(r.kids[0], frame, universe, args).empty()) out.insert(frame);
  } else if (r.kind == "Arg") {
    out.insert(args.at(r.arg));
  }
  return out;
}

RefSpec build(const Ref& r) {
  Constraint c;
  if (!r.op.empty()) c.op = r.op;
  if (!r.atom.empty()) c.atom = r.atom;
  std::optional<int> operand;
  if (r.operand) operand = r.operand;
  if (r.kind == "Identity") return RefSpec::identity(c);
  if (r.kind == "SubOf") return RefSpec::sub_of(c, operand);
  if (r.kind == "SuperOf") return RefSpec::super_of(c, operand);
  if (r.kind == "Both") return RefSpec::both(build(r.kids[0]), build(r.kids[1]));
  if (r.kind == "Either") return RefSpec::either(build(r.kids[0]), build(r.kids[1]));
  if (r.kind == "And") return RefSpec::and_then(build(r.kids[0]), build(r.kids[1]));
  if (r.kind == "That") return RefSpec::that(build(r.kids[0]));
  return RefSpec::arg(r.arg);
}

Ref random_ref(std::mt19937& rng, int depth) {
  static const char* leaves[] = {"Identity", "SubOf", "SuperOf", "Arg"};
  static const char* nodes[] = {"Both", "Either", "And", "That"};
  Ref r;
  if (depth == 0 || rng() % 2) {
    r.kind = leaves[rng() % 4];
    if (r.kind == "Arg") {
      r.arg = rng() % 2 ? "x" : "y";
      return r;
    }
    switch (rng() % 4) {
      case 0: r.op = rng() % 2 ? "->" : "not"; break;
      case 1: r.atom = rng() % 2 ? "A" : "B"; break;
      default: break;
    }
    if (r.kind != "Identity" && rng() % 2) r.operand = 1 + static_cast<int>(rng() % 2);
    return r;
  }
  r.kind = nodes[rng() % 4];
  r.kids.push_back(random_ref(rng, depth - 1));
  if (r.kind != "That") r.kids.push_back(random_ref(rng, depth - 1));
  return r;
}

}  // namespace

TEST_CASE("evaluation agrees with set definitions") {
  auto t = table();
  std::mt19937 rng(99);
  int nonempty = 0;
  for (int i = 0; i < 2000; ++i) {
    Ref r = random_ref(rng, 3);
    RefSpec spec = build(r);
    std::string frame_text = oracle::random_sexpr(rng, {"A", "B"}, 3);
    std::set<Tree> universe_t;
    FormulaSet universe;
    for (int k = 0; k < 5; ++k) {
      std::string u = oracle::random_sexpr(rng, {"A", "B"}, 4);
      for (const auto& s : oracle::subformula_strings(u)) {
        universe_t.insert(oracle::parse_tree(s));
        universe.insert(parse_formula(t, s));
      }
    }
    std::map<std::string, Tree> args_t;
    std::map<std::string, Formula> args;
    for (const char* name : {"x", "y"}) {
      std::string s = oracle::random_sexpr(rng, {"A", "B"}, 2);
      args_t[name] = oracle::parse_tree(s);
      args[name] = parse_formula(t, s);
    }
    RefContext ctx{parse_formula(t, frame_text), &universe, &args};
    std::set<std::string> want, got;
    for (const auto& w : eval(r, oracle::parse_tree(frame_text), universe_t, args_t)) want.insert(oracle::show_tree(w));
    for (const auto& g : eval_ref(spec, ctx)) got.insert(to_sexpr(g));
    REQUIRE_MESSAGE(got == want, spec.to_string() << " on " << frame_text);
    if (!want.empty()) ++nonempty;

    // Printing and parsing back gives the same reference.
    CHECK(RefSpec::parse(spec.to_string()).to_string() == spec.to_string());
  }
  CHECK(nonempty > 500);
}

TEST_CASE("surface syntax") {
  auto r = RefSpec::parse("And(Arg(major), SubOf(operator=->, operand=2))");
  CHECK(r.kind() == RefSpec::Kind::And);
  CHECK(r.lhs().arg_name() == "major");
  CHECK(r.rhs().operand() == 2);
  CHECK(*r.rhs().constraint().op == "->");
  CHECK(RefSpec::parse("Identity").kind() == RefSpec::Kind::Identity);
  CHECK(RefSpec::parse("SubOf(atom=p)").constraint().atom == std::optional<std::string>("p"));
  CHECK_ERRC(RefSpec::parse("Frob"), Errc::SyntaxError);
  CHECK_ERRC(RefSpec::parse("Both(Identity)"), Errc::SyntaxError);
  CHECK_ERRC(RefSpec::parse("SubOf(operand=x)"), Errc::SyntaxError);
  CHECK_ERRC(RefSpec::parse("SubOf(colour=1)"), Errc::SyntaxError);
}

TEST_CASE("validation") {
  CHECK(validate_ref(RefSpec::parse("And(Arg(a), SubOf(operand=1))"), {"a"}).empty());
  auto issues = validate_ref(RefSpec::parse("Both(Arg(b), Identity)"), {"a"});
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].kind == RefIssue::Kind::UnboundArgument);
  issues = validate_ref(RefSpec::make(RefSpec::Kind::Identity, {}, 1), {});
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].kind == RefIssue::Kind::MisplacedOperandIndex);
  issues = validate_ref(RefSpec::parse("SubOf(operand=0)"), {});
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].kind == RefIssue::Kind::BadOperandIndex);
}

TEST_CASE("evaluation errors") {
  auto t = table();
  RefContext ctx{parse_formula(t, "A"), nullptr, nullptr};
  CHECK_ERRC(eval_ref(RefSpec::arg("x"), ctx), Errc::UnboundArgument);
  CHECK_ERRC(eval_ref(RefSpec::super_of(), ctx), Errc::InvalidRef);
}
