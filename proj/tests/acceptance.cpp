// One PASS/FAIL line per acceptance criterion.  Exit status is the number
// of failures.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "api.hpp"
#include "corpus.hpp"
#include "glf/server.hpp"
#include "oracles.hpp"
#include "tactic_suite.hpp"
#include "worked.hpp"

using namespace glf;
using nlohmann::json;

namespace {

// Time limits, seconds.
constexpr double kWorkedLimit = 1.0;
constexpr double kAlgebraLimit = 60.0;
constexpr double kSeparationLimit = 30.0;
constexpr double kHilbertLimit = 1.0;

// Sizes.
constexpr std::size_t kTriples = 500;
constexpr std::size_t kMinProofs = 100;
constexpr int kGraphs = 1000;
constexpr int kTransforms = 1000;
constexpr std::size_t kSeparationFuel = 10000;
constexpr int kClassicalSamples = 300;

struct Verdict {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) note << "failed: " << what << "; ";
    ok = ok && cond;
  }
};

const Registry& registry() {
  static const Registry r = Registry::builtin();
  return r;
}

int failures = 0;

void criterion(const std::string& name, double limit, const std::function<void(Verdict&)>& body) {
  Verdict v;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit > 0) v.require(secs < limit, "took longer than " + std::to_string(limit) + " s");
  if (!v.ok) ++failures;
  std::cout << (v.ok ? "PASS " : "FAIL ") << name << "  [" << std::fixed << std::setprecision(3) << secs << " s] "
            << v.note.str() << "\n"
            << std::flush;
}

void worked_example(Verdict& v) {
  auto nd = registry().get(worked::kSystem);
  auto p = Proof::create(nd, parse_formula(nd->table, worked::kGoal));
  for (const auto& s : worked::script()) worked::apply_step(*p, s);
  v.require(p->check().complete, "checkComplete");
  auto doc = p->to_document();
  auto c = worked::count_labels(doc);
  auto walk = worked::walk(doc);
  std::size_t want_deductions = worked::expected_deductions(worked::script());
  std::size_t want_formulas = oracle::subformula_strings(worked::kGoal).size();
  v.require(want_formulas == 8 && want_deductions == 8, "independent counts are 8 and 8");
  v.require(c.formulas == want_formulas, "formula vertices");
  v.require(c.deductions == want_deductions, "deduction vertices");
  v.require(c.derives == want_deductions, "derives edges");
  v.require(c.premises == want_deductions - 1, "premise edges");
  v.require(walk.tree && walk.nodes == want_deductions, "deductions form one tree");
  v.note << c.formulas << " formulas, " << c.deductions << " deductions, " << c.derives << " derives, " << c.premises
         << " premises";
}

suite::Report& algebra_report() {
  static suite::Report rep = suite::check(registry(), kTriples, 2026);
  return rep;
}

void tactic_algebra(Verdict& v) {
  const auto& rep = algebra_report();
  v.require(rep.triples >= kTriples, "enough triples");
  v.require(rep.errors.empty(), rep.errors.empty() ? "" : rep.errors.front());
  v.require(rep.algebra_violations.empty(), rep.algebra_violations.empty() ? "" : rep.algebra_violations.front());
  v.require(rep.try_many_failures.empty(), rep.try_many_failures.empty() ? "" : rep.try_many_failures.front());
  v.note << rep.triples << " triples, " << rep.comparisons << " comparisons";
}

void backtracking(Verdict& v) {
  const auto& rep = algebra_report();
  v.require(rep.failing_runs > 0, "some runs fail");
  v.require(rep.rollback_violations.empty(), rep.rollback_violations.empty() ? "" : rep.rollback_violations.front());
  v.note << rep.failing_runs << " failing runs restored";
}

void separation(Verdict& v) {
  const char* peirce = "(-> (-> (-> A B) A) A)";
  const char* dne = "(-> (not (not A)) A)";
  auto prove = [](const std::string& system, const std::string& goal, std::size_t fuel) {
    auto sys = registry().get(system);
    return prove_with_strategy(sys, parse_formula(sys->table, goal), sys->default_strategy, fuel);
  };
  for (const char* g : {peirce, dne}) {
    auto c = prove("fitch-classical", g, kDefaultFuel);
    v.require(c.outcome.success() && c.proof->check().complete, std::string("fitch-classical proves ") + g);
    v.require(oracle::tautology(g), std::string("oracle accepts ") + g);
    auto i = prove("nd-intuitionistic", g, kSeparationFuel);
    v.require(!i.outcome.success() && !i.proof->complete(), std::string("nd-intuitionistic fails ") + g);
  }
  // Everything the classical strategies find is a classical tautology.
  std::mt19937 rng(4);
  int found = 0;
  for (int k = 0; k < kClassicalSamples; ++k) {
    std::string g = oracle::random_sexpr(rng, {"A", "B", "C", "D"}, 3);
    bool taut = oracle::tautology(g);
    for (const char* s : {"fitch-classical", "nd-classical"}) {
      auto r = prove(s, g, 2000);
      if (!r.outcome.success()) continue;
      ++found;
      v.require(taut, std::string(s) + " proved non-tautology " + g);
    }
  }
  v.note << found << " classical theorems found, all tautologies";
}

void hilbert_k(Verdict& v) {
  auto hk = registry().get("hilbert-k");
  auto F = [&](const std::string& s) { return parse_formula(hk->table, s); };
  auto result = [&](const std::string& s) {
    Assignment a;
    a.result = F(s);
    return a;
  };
  auto cite = [](std::map<std::string, int> lines) {
    Assignment a;
    a.lines = std::move(lines);
    return a;
  };
  auto p = Proof::create(hk, F("(box (-> p p))"));
  p->apply("K2", result("(-> (-> p (-> (-> p p) p)) (-> (-> p (-> p p)) (-> p p)))"));
  p->apply("K1", result("(-> p (-> (-> p p) p))"));
  p->apply("mp", cite({{"imp", 1}, {"ante", 2}}));
  p->apply("K1", result("(-> p (-> p p))"));
  p->apply("mp", cite({{"imp", 3}, {"ante", 4}}));
  v.require(!p->complete(), "five lines do not finish");
  p->apply("nec", cite({{"body", 5}}));
  const auto& lines = dynamic_cast<LinearProof&>(*p).state().lines();
  v.require(lines.size() == 6, "six lines");
  v.require(lines.back().formula == F("(box (-> p p))"), "last line is box (p -> p)");
  v.require(p->check().complete, "checkComplete");

  auto q = Proof::create(hk, F("(box q)"));
  q->apply("hyp", result("q"));
  bool rejected = false;
  try {
    q->apply("nec", cite({{"body", 1}}));
  } catch (const Error& e) {
    rejected = e.code() == Errc::NecessitationUnderHypothesis;
  }
  v.require(rejected, "necessitation under a hypothesis rejected");
  v.require(dynamic_cast<LinearProof&>(*q).state().lines().size() == 1, "rejected step left no line");
  v.note << "6-line derivation; necessitation under hypothesis rejected";
}

void subformula_invariant(Verdict& v) {
  auto found = corpus::backward_proofs(registry(), 120, 1);
  v.require(found.size() >= kMinProofs, "at least " + std::to_string(kMinProofs) + " proofs");
  std::size_t formulas = 0;
  for (const auto& f : found) {
    v.require(Proof::import(registry().get(f.system), f.document)->complete(), "complete: " + f.goal);
    auto bad = corpus::outside_subformulas(f.document);
    v.require(bad.empty(), f.system + " " + f.goal + " uses " + (bad.empty() ? "" : bad.front()));
    formulas += worked::count_labels(f.document).formulas;
  }
  v.note << found.size() << " proofs, " << formulas << " formula vertices";
}

void graph_store(Verdict& v) {
  using namespace glf::graph;
  std::mt19937 rng(2024);
  int agree = 0, nonempty = 0;
  for (int i = 0; i < kGraphs; ++i) {
    PropertyGraph g = oracle::random_graph(rng);
    GraphPattern p = oracle::random_pattern(rng, g);
    auto want = oracle::brute_match(g, p);
    if (match(g, p) == want) ++agree;
    if (!want.empty()) ++nonempty;
  }
  v.require(agree == kGraphs, "matcher agrees on every graph");
  v.require(nonempty > 0, "some patterns match");

  std::mt19937 rng2(77);
  int restored = 0, applied = 0;
  for (int i = 0; i < kTransforms; ++i) {
    PropertyGraph g = oracle::random_graph(rng2);
    GraphPattern p = oracle::random_pattern(rng2, g);
    TransformScript s = oracle::random_script(rng2, p);
    PropertyGraph before = g;
    auto bindings = match(g, p);
    std::size_t which = bindings.empty() ? 0 : rng2() % bindings.size();
    try {
      auto r = apply_transform(g, p, s, which);
      ++applied;
      g.rollback(r.undo);
    } catch (const Error&) {
    }
    if (g == before) ++restored;
  }
  v.require(restored == kTransforms, "undo restores every graph");
  v.require(applied > 0, "some transforms apply");
  v.note << agree << "/" << kGraphs << " graphs agree (" << nonempty << " with matches), " << restored << "/"
         << kTransforms << " transforms restored (" << applied << " applied)";
}

void api_fidelity(Verdict& v) {
  auto reg = std::make_shared<const Registry>(Registry::builtin());
  Server server(reg, {});
  int port = server.start_background();
  api::Client c(port);
  std::string sid = c.create(worked::kSystem, worked::kGoal);
  api::play_worked(c, sid);
  v.require(c.get(c.base(sid) + "/export").body == api::library_worked_export(*reg), "export byte-identical");

  std::string other = c.create(worked::kSystem, worked::kGoal);
  v.require(c.post(c.base(other) + "/apply", {{"rule", "impI"}, {"version", 0}}).status == 200, "first apply");
  auto state = c.get(c.base(other)).body;
  auto doc = c.get(c.base(other) + "/export").body;
  int stale = 0;
  for (const auto& [path, body] : std::vector<std::pair<std::string, json>>{
           {"/apply", {{"rule", "impI"}, {"version", 0}}},
           {"/tactic", {{"tactic", "auto"}, {"version", 0}}},
           {"/undo", {{"version", 0}}}}) {
    api::Res r = c.post(c.base(other) + path, body);
    if (r.status == 409 && r.j()["error"] == "StaleVersion") ++stale;
    v.require(c.get(c.base(other)).body == state && c.get(c.base(other) + "/export").body == doc,
              path + " left state unchanged");
  }
  v.require(stale == 3, "stale requests answered 409");
  server.stop();
  v.note << "export identical; " << stale << " stale requests refused";
}

}  // namespace

int main() {
  registry();
  criterion("worked-example reconstruction", kWorkedLimit, worked_example);
  criterion("tactic algebra", kAlgebraLimit, tactic_algebra);
  criterion("backtracking totality", 0, backtracking);
  criterion("classical/intuitionistic separation", kSeparationLimit, separation);
  criterion("hilbert K necessitation", kHilbertLimit, hilbert_k);
  criterion("subformula invariant", 0, subformula_invariant);
  criterion("graph-store oracle", 0, graph_store);
  criterion("API fidelity", 0, api_fidelity);
  return failures;
}
