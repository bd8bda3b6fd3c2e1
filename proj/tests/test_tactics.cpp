#include "glf/tactics.hpp"
#include "glf/systems.hpp"
#include "tactic_suite.hpp"
#include "testing.hpp"

using namespace glf;

namespace {

const Registry& registry() {
  static const Registry r = Registry::builtin();
  return r;
}

}  // namespace

TEST_CASE("tactic text round trip") {
  for (const char* s : {"Atomic(impI)", "Many(Atomic(impI))", "Try(Atomic(hyp))",
                        "AndThen(Atomic(impI), Atomic(hyp))", "Some(Atomic(impE, [nocycle, hyps]))",
                        "OrElse(Atomic(hyp), Many(Atomic(andI, [sub, goal])))",
                        "Atomic(assume, [nocycle, negation])"}) {
    Tactic t = Tactic::parse(s);
    CHECK(t.to_string() == s);
    CHECK(Tactic::parse(t.to_string()).to_string() == s);
  }
  // AndThen takes any number of steps.
  auto t = Tactic::parse("AndThen(Atomic(a), Atomic(b), Atomic(c))");
  CHECK(t.rules_used() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("tactic parse errors") {
  CHECK_ERRC(Tactic::parse("Atomic()"), Errc::SyntaxError);
  CHECK_ERRC(Tactic::parse("Many(Atomic(a), Atomic(b))"), Errc::SyntaxError);
  CHECK_ERRC(Tactic::parse("Atomic(a, [sideways])"), Errc::SyntaxError);
  CHECK_ERRC(Tactic::parse("Frob(Atomic(a))"), Errc::SyntaxError);
  CHECK_ERRC(Tactic::parse("auto"), Errc::UnknownStrategy);
}

TEST_CASE("strategy names resolve") {
  auto nd = registry().get("nd-minimal");
  auto t = Tactic::parse("AndThen(intro, Atomic(hyp))", [&](const std::string& n) -> std::optional<Tactic> {
    if (auto* s = nd->find_strategy(n)) return *s;
    return std::nullopt;
  });
  auto p = Proof::create(nd, parse_formula(nd->table, "(-> A (-> B A))"));
  auto out = run(t, *p);
  CHECK(out.success());
  CHECK(p->complete());
  CHECK(out.applications == 3);
}

TEST_CASE("desugaring") {
  auto t = Tactic::parse("Some(OrElse(Atomic(a), Atomic(b)))");
  CHECK(t.desugared().to_string() ==
        "AndThen(AndThen(Try(Atomic(a)), Atomic(b)), Many(AndThen(Try(Atomic(a)), Atomic(b))))");
}

TEST_CASE("atomic backtracks over candidates") {
  // The first impE candidate does not lead to a proof; the run must move on.
  auto nd = registry().get("nd-intuitionistic");
  auto p = Proof::create(nd, parse_formula(nd->table, "(-> (-> (and A B) C) (-> B (-> A C)))"));
  auto t = Tactic::parse(
      "AndThen(Atomic(impI), Atomic(impI), Atomic(impI), Atomic(impE), Atomic(andI), Atomic(hyp), Atomic(hyp), "
      "Atomic(hyp))");
  auto out = run(t, *p);
  REQUIRE(out.success());
  CHECK(p->complete());
  CHECK(out.trace.size() == 8);
  CHECK(out.applications == 9);
  CHECK(to_sexpr(out.trace[3].assignment.args.at("major")) == "(-> (and A B) C)");
}

TEST_CASE("try and many") {
  auto nd = registry().get("nd-minimal");
  auto p = Proof::create(nd, parse_formula(nd->table, "(-> A (-> B C))"));
  CHECK(run(Tactic::parse("Try(Atomic(hyp))"), *p).success());
  CHECK(p->history_size() == 0);
  auto out = run(Tactic::parse("Many(Atomic(impI))"), *p);
  CHECK(out.success());
  CHECK(out.applications == 2);
  CHECK(run(Tactic::parse("Atomic(hyp)"), *p).status == TacticOutcome::Status::Failure);
  CHECK(p->history_size() == 2);
}

TEST_CASE("failed runs roll back") {
  auto nd = registry().get("nd-minimal");
  auto p = Proof::create(nd, parse_formula(nd->table, "(-> A (-> B C))"));
  auto before = p->to_document().dump();
  auto out = run(Tactic::parse("AndThen(Many(Atomic(impI)), Atomic(hyp))"), *p);
  CHECK(out.status == TacticOutcome::Status::Failure);
  CHECK(out.applications == 2);
  CHECK(p->to_document().dump() == before);
  out = run(Tactic::parse("Many(Atomic(impI))"), *p, {kDefaultFuel, true});
  CHECK(out.status == TacticOutcome::Status::Failure);
  CHECK(p->to_document().dump() == before);
}

TEST_CASE("unknown rules roll back too") {
  auto nd = registry().get("nd-minimal");
  auto p = Proof::create(nd, parse_formula(nd->table, "(-> A A)"));
  auto before = p->to_document().dump();
  CHECK_ERRC(run(Tactic::parse("AndThen(Atomic(impI), Atomic(nothing))"), *p), Errc::UnknownRule);
  CHECK(p->to_document().dump() == before);
}

TEST_CASE("fuel") {
  auto nd = registry().get("nd-classical");
  auto p = Proof::create(nd, parse_formula(nd->table, "(-> (-> (-> A B) A) A)"));
  auto out = run(Tactic::parse("Many(Atomic(raa))"), *p, {5, false});
  CHECK(out.status == TacticOutcome::Status::FuelExhausted);
  CHECK(out.applications == 5);
  CHECK(p->history_size() == 0);
  auto ok = run(nd->strategy("auto"), *p, {kDefaultFuel, true});
  CHECK(ok.success());
  auto q = Proof::create(nd, parse_formula(nd->table, "(-> (-> (-> A B) A) A)"));
  auto short_run = run(nd->strategy("auto"), *q, {ok.applications - 1, true});
  CHECK(short_run.status == TacticOutcome::Status::FuelExhausted);
}

TEST_CASE("combinator laws on random triples") {
  auto rep = suite::check(registry(), 150, 7);
  CHECK(rep.errors.empty());
  for (const auto& v : rep.errors) MESSAGE(v);
  CHECK(rep.algebra_violations.empty());
  for (const auto& v : rep.algebra_violations) MESSAGE(v);
  CHECK(rep.try_many_failures.empty());
  for (const auto& v : rep.try_many_failures) MESSAGE(v);
  CHECK(rep.rollback_violations.empty());
  for (const auto& v : rep.rollback_violations) MESSAGE(v);
  // Both kinds of run must actually occur.
  CHECK(rep.failing_runs > 50);
  CHECK(rep.successes > 50);
}
