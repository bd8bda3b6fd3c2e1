#include "glf/proofgraph.hpp"
#include "testing.hpp"

using namespace glf;
namespace ps = glf::proof_schema;

namespace {

OperatorTable table() { return OperatorTable({{"->", 2, true, "→"}, {"and", 2, true, "∧"}}); }
Formula F(const std::string& s) { return parse_formula(table(), s); }

std::optional<std::size_t> counts(const std::string& rule) {
  if (rule == "impI") return 1;
  if (rule == "andI") return 2;
  return std::nullopt;
}

}  // namespace

TEST_CASE("fresh state has one open goal") {
  ProofState st("t", table(), F("(-> A A)"));
  REQUIRE(st.open_goals().size() == 1);
  CHECK(st.focus() == st.root());
  CHECK(st.status(st.root()) == NodeStatus::Goal);
  CHECK(st.formula(st.root()) == F("(-> A A)"));
  CHECK(st.hypotheses(st.root()).empty());
  CHECK(!st.check().complete);
  CHECK(st.check().open_goals == 1);
  CHECK(st.check().violations.empty());
}

TEST_CASE("expand, close and undo") {
  ProofState st("t", table(), F("(-> A A)"));
  auto kids = st.expand(st.root(), "impI", {{"body", F("A"), {F("A")}}});
  REQUIRE(kids.size() == 1);
  CHECK(st.status(st.root()) == NodeStatus::Regular);
  CHECK(st.rule(st.root()) == "impI");
  CHECK(st.parent(kids[0]) == st.root());
  CHECK(st.assumed_at(kids[0]) == FormulaSet{F("A")});
  CHECK(st.hypotheses(kids[0]) == FormulaSet{F("A")});
  CHECK(st.hypotheses(st.root()).empty());
  CHECK(st.premises(st.root()) == std::vector<std::pair<std::string, graph::VertexId>>{{"body", kids[0]}});

  CHECK_ERRC(st.close_with_hypothesis(st.root()), Errc::NotAGoal);
  st.close_with_hypothesis(kids[0]);
  CHECK(st.status(kids[0]) == NodeStatus::Leaf);
  CHECK(st.open_goals().empty());
  auto rep = st.check(counts);
  CHECK(rep.complete);
  CHECK(rep.violations.empty());

  auto before_close = st.history_size();
  st.undo();
  CHECK(st.history_size() == before_close - 1);
  CHECK(st.open_goals() == std::vector<graph::VertexId>{kids[0]});
  st.undo();
  CHECK(st.open_goals() == std::vector<graph::VertexId>{st.root()});
  CHECK_ERRC(st.undo(), Errc::NothingToUndo);
}

TEST_CASE("closing needs a visible hypothesis") {
  ProofState st("t", table(), F("(and A B)"));
  auto kids = st.expand(st.root(), "andI", {{"left", F("A"), {}}, {"right", F("B"), {}}});
  CHECK_ERRC(st.close_with_hypothesis(kids[0]), Errc::NotAHypothesis);
  CHECK(st.status(kids[0]) == NodeStatus::Goal);
}

TEST_CASE("open goals are in depth-first order") {
  ProofState st("t", table(), F("(and (and A B) C)"));
  auto top = st.expand(st.root(), "andI", {{"left", F("(and A B)"), {}}, {"right", F("C"), {}}});
  auto inner = st.expand(top[0], "andI", {{"left", F("A"), {}}, {"right", F("B"), {}}});
  CHECK(st.open_goals() == std::vector<graph::VertexId>{inner[0], inner[1], top[1]});
  CHECK(st.focus() == inner[0]);
}

TEST_CASE("formulas are shared between deductions") {
  ProofState st("t", table(), F("(and A A)"));
  auto kids = st.expand(st.root(), "andI", {{"left", F("A"), {}}, {"right", F("A"), {}}});
  const auto& g = st.graph();
  // Root formula, A: two formula vertices; three deductions.
  CHECK(g.vertices_with_label(schema::kFormula).size() == 2);
  CHECK(g.vertices_with_label(ps::kDeduction).size() == 3);
  CHECK(st.universe() == FormulaSet{F("A"), F("(and A A)")});
  (void)kids;
}

TEST_CASE("check flags wrong premise counts") {
  ProofState st("t", table(), F("(and A B)"));
  st.expand(st.root(), "andI", {{"left", F("A"), {}}});
  auto rep = st.check(counts);
  CHECK(!rep.violations.empty());
}

TEST_CASE("document round trip and tampering") {
  ProofState st("t", table(), F("(-> A (and A A))"));
  auto k = st.expand(st.root(), "impI", {{"body", F("(and A A)"), {F("A")}}});
  auto k2 = st.expand(k[0], "andI", {{"left", F("A"), {}}, {"right", F("A"), {}}});
  st.close_with_hypothesis(k2[0]);
  auto doc = st.to_document();
  CHECK(doc["system"] == "t");
  CHECK(doc["rootGoal"] == "(-> A (and A A))");

  auto back = ProofState::from_document(doc, table(), counts);
  CHECK(back.to_document().dump() == doc.dump());
  CHECK(back.open_goals() == st.open_goals());
  CHECK(back.hypotheses(k2[1]) == FormulaSet{F("A")});

  // Break things one at a time.
  {
    auto bad = doc;
    bad["rootGoal"] = "(-> B B)";
    CHECK_ERRC(ProofState::from_document(bad, table(), counts), Errc::ImportError);
  }
  {
    auto bad = doc;
    for (auto& e : bad["edges"])
      if (e["labels"][0] == ps::kDerives) {
        e["dst"] = e["src"];
        break;
      }
    CHECK_ERRC(ProofState::from_document(bad, table(), counts), Errc::ImportError);
  }
  {
    auto bad = doc;
    bad["edges"] = nlohmann::json::array();
    CHECK_ERRC(ProofState::from_document(bad, table(), counts), Errc::ImportError);
  }
  {
    auto bad = doc;
    for (auto& v : bad["vertices"])
      if (v["props"].contains(ps::kStatus) && v["props"][ps::kStatus] == "leaf") v["props"][ps::kStatus] = "sideways";
    CHECK_ERRC(ProofState::from_document(bad, table(), counts), Errc::ImportError);
  }
  {
    auto bad = doc;
    bad["vertices"].push_back({{"id", "900"}, {"labels", {"Deduction"}}, {"props", {{"status", "goal"}}}});
    CHECK_ERRC(ProofState::from_document(bad, table(), counts), Errc::ImportError);
  }
  CHECK_ERRC(ProofState::from_document(nlohmann::json::object(), table(), counts), Errc::ImportError);
}

TEST_CASE("linear state bookkeeping") {
  LinearState st("f", table(), F("(-> A A)"));
  CHECK(st.current() == 0);
  CHECK(st.target() == F("(-> A A)"));
  int sp = st.open_subproof(false);
  CHECK(sp == st.current());
  Line h;
  h.formula = F("A");
  h.rule = "assume";
  h.hypothesis = true;
  int l1 = st.append(h);
  st.set_hypothesis(l1, F("(-> A A)"));
  CHECK(st.line(l1).depth == 1);
  CHECK(st.line(l1).deps == std::set<int>{l1});
  CHECK(st.citable(l1));
  CHECK(st.citable_line_with(F("A")) == l1);
  CHECK(st.target() == F("A"));
  st.close_subproof();
  CHECK(st.current() == 0);
  CHECK(!st.citable(l1));
  CHECK(!st.complete());

  Line c;
  c.formula = F("(-> A A)");
  c.rule = "impI";
  c.cites = {{"sub", l1}};
  int l2 = st.append(c);
  CHECK(st.line(l2).deps.empty());
  CHECK(st.complete());
  CHECK(st.check().complete);

  auto g = st.to_graph();
  CHECK(g.vertices_with_label(ps::kDeduction).size() == 2);
}
