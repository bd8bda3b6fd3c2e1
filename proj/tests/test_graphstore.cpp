#include <random>

#include "oracles.hpp"
#include "testing.hpp"

using namespace glf;
using namespace glf::graph;

TEST_CASE("vertices and edges") {
  PropertyGraph g;
  auto a = g.add_vertex({"Formula"}, {{"sexpr", "A"}, {"n", 1}});
  auto b = g.add_vertex({"Formula", "Atom"});
  auto e = g.add_edge(a, b, {"operand"}, {{"index", 1}});
  CHECK(g.vertex_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.vertex(a).props.at("sexpr") == Value("A"));
  CHECK(g.edge(e).src == a);
  CHECK(g.out_edges(a).count(e) == 1);
  CHECK(g.in_edges(b).count(e) == 1);
  CHECK(g.vertices_with_label("Formula") == std::vector<VertexId>{a, b});
  CHECK(g.vertices_with_label("Atom") == std::vector<VertexId>{b});

  g.set_property(a, "n", 2);
  CHECK(*g.property(a, "n") == Value(2));
  g.remove_property(a, "n");
  CHECK(g.property(a, "n") == nullptr);
  g.add_label(e, "x");
  CHECK(g.edge(e).labels.count("x") == 1);
  g.remove_label(b, "Atom");
  CHECK(g.vertices_with_label("Atom").empty());

  g.remove_vertex(b);
  CHECK(!g.has_edge(e));
  CHECK(g.out_edges(a).empty());
}

TEST_CASE("store errors") {
  PropertyGraph g;
  auto a = g.add_vertex({});
  CHECK_ERRC(g.add_vertex({}, {{"k", 1}, {"k", 2}}), Errc::DuplicateKey);
  CHECK_ERRC(g.add_edge(a, VertexId{99}, {}), Errc::UnknownVertex);
  CHECK_ERRC(g.vertex(VertexId{99}), Errc::UnknownVertex);
  CHECK_ERRC(g.edge(EdgeId{7}), Errc::UnknownEdge);
  CHECK_ERRC(g.remove_edge(EdgeId{7}), Errc::UnknownEdge);
  CHECK_ERRC(g.set_property(VertexId{5}, "k", 1), Errc::UnknownVertex);
  CHECK(g.vertex_count() == 1);
}

TEST_CASE("rollback restores every kind of change") {
  std::mt19937 rng(11);
  for (int round = 0; round < 200; ++round) {
    PropertyGraph g = oracle::random_graph(rng);
    PropertyGraph before = g;
    auto sp = g.savepoint();
    for (int k = 0; k < 12; ++k) {
      std::vector<VertexId> vs;
      for (const auto& [id, v] : g.vertices()) vs.push_back(id);
      std::vector<EdgeId> es;
      for (const auto& [id, e] : g.edges()) es.push_back(id);
      switch (rng() % 7) {
        case 0: g.add_vertex({"A"}, {{"k", 3}}); break;
        case 1: if (!vs.empty()) g.add_edge(vs[rng() % vs.size()], vs[rng() % vs.size()], {"B"}); break;
        case 2: if (!vs.empty()) g.remove_vertex(vs[rng() % vs.size()]); break;
        case 3: if (!es.empty()) g.remove_edge(es[rng() % es.size()]); break;
        case 4: if (!vs.empty()) g.set_property(vs[rng() % vs.size()], "k", oracle::random_value(rng)); break;
        case 5: if (!es.empty()) g.remove_property(es[rng() % es.size()], "k"); break;
        default: if (!vs.empty()) g.add_label(vs[rng() % vs.size()], "C"); break;
      }
    }
    g.rollback(sp);
    REQUIRE(g == before);
    // Indexes came back too.
    for (const auto& l : oracle::label_pool()) CHECK(g.vertices_with_label(l) == before.vertices_with_label(l));
    for (const auto& [id, v] : g.vertices()) {
      CHECK(g.out_edges(id) == before.out_edges(id));
      CHECK(g.in_edges(id) == before.in_edges(id));
    }
  }
}

TEST_CASE("document round trip") {
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    PropertyGraph g = oracle::random_graph(rng);
    auto doc = g.to_document();
    PropertyGraph back = PropertyGraph::from_document(doc);
    CHECK(back == g);
    CHECK(back.to_document().dump() == doc.dump());
    // New ids never collide with imported ones.
    auto v = back.add_vertex({});
    CHECK(!g.has_vertex(v));
  }
}

TEST_CASE("document import errors") {
  PropertyGraph g;
  auto a = g.add_vertex({});
  g.add_edge(a, a, {});
  auto doc = g.to_document();

  auto bad = doc;
  bad["version"] = 2;
  CHECK_ERRC(PropertyGraph::from_document(bad), Errc::ImportError);
  bad = doc;
  bad["edges"][0]["dst"] = "42";
  CHECK_ERRC(PropertyGraph::from_document(bad), Errc::ImportError);
  bad = doc;
  bad["vertices"].push_back(doc["vertices"][0]);
  CHECK_ERRC(PropertyGraph::from_document(bad), Errc::ImportError);
  bad = doc;
  bad["vertices"][0]["props"]["x"] = 1.5;
  CHECK_ERRC(PropertyGraph::from_document(bad), Errc::ImportError);
  CHECK_ERRC(PropertyGraph::from_document(nlohmann::json::array()), Errc::ImportError);
}

TEST_CASE("compacted renumbers densely") {
  PropertyGraph g;
  auto a = g.add_vertex({"A"});
  auto b = g.add_vertex({"B"});
  auto c = g.add_vertex({"C"});
  g.remove_vertex(b);
  g.add_edge(c, a, {"e"});
  auto k = g.compacted();
  REQUIRE(k.vertex_count() == 2);
  CHECK(k.vertex(VertexId{0}).labels == Labels{"A"});
  CHECK(k.vertex(VertexId{1}).labels == Labels{"C"});
  CHECK(k.edge(EdgeId{0}).src == VertexId{1});
}

TEST_CASE("matcher agrees with exhaustive enumeration") {
  std::mt19937 rng(2024);
  std::size_t nonempty = 0;
  for (int i = 0; i < 1000; ++i) {
    PropertyGraph g = oracle::random_graph(rng);
    GraphPattern p = oracle::random_pattern(rng, g);
    auto want = oracle::brute_match(g, p);
    auto got = match(g, p);
    REQUIRE_MESSAGE(got == want, "graph " << g.to_document().dump() << " case " << i);
    CHECK(count_matches(g, p) == want.size());
    if (!want.empty()) ++nonempty;
  }
  // The generator is useless if nothing ever matches.
  CHECK(nonempty > 200);
}

TEST_CASE("pattern validation") {
  GraphPattern p;
  p.nodes.push_back({"a", {}, {}, {}});
  p.nodes.push_back({"a", {}, {}, {}});
  CHECK_ERRC(p.validate(), Errc::InvalidRef);
  p.nodes.pop_back();
  p.edges.push_back({"", "a", "zz", {}, {}, Direction::Out});
  CHECK_ERRC(p.validate(), Errc::InvalidRef);
}

TEST_CASE("transforms apply atomically and undo exactly") {
  std::mt19937 rng(77);
  int applied = 0, failed = 0;
  for (int i = 0; i < 1000; ++i) {
    PropertyGraph g = oracle::random_graph(rng);
    GraphPattern p = oracle::random_pattern(rng, g);
    TransformScript s = oracle::random_script(rng, p);
    PropertyGraph before = g;
    auto bindings = match(g, p);
    std::size_t which = bindings.empty() ? 0 : rng() % bindings.size();
    try {
      auto r = apply_transform(g, p, s, which);
      ++applied;
      CHECK(r.binding == bindings[which]);
      for (const auto& [b, v] : r.created_vertices) CHECK(g.has_vertex(v));
      g.rollback(r.undo);
      REQUIRE(g == before);
    } catch (const Error& e) {
      ++failed;
      CHECK((e.code() == Errc::NoMatch || e.code() == Errc::TransformFailed));
      if (e.code() == Errc::NoMatch) CHECK(bindings.empty());
      REQUIRE(g == before);
    }
  }
  CHECK(applied > 150);
  CHECK(failed > 0);
}
