#pragma once

// Reference implementations used only by tests.  They recompute things the
// library computes, by the most direct method available, without calling
// the code under test for anything but plain data access.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "glf/formula.hpp"
#include "glf/graphstore.hpp"

namespace oracle {

using namespace glf::graph;

// ---------------------------------------------------------------------------
// Pattern matching by enumerating every assignment of node binders to
// vertices and edge binders to distinct edges.

inline bool props_ok(const Properties& have, const std::vector<PropertyConstraint>& cs) {
  for (const auto& c : cs) {
    auto it = have.find(c.key);
    if (it == have.end()) return false;
    bool eq = it->second == c.value;
    if (c.cmp == Cmp::Eq ? !eq : eq) return false;
  }
  return true;
}

inline bool labels_ok(const Labels& have, const Labels& want) {
  for (const auto& l : want)
    if (!have.count(l)) return false;
  return true;
}

inline std::vector<Binding> brute_match(const PropertyGraph& g, const GraphPattern& p) {
  std::vector<VertexId> vs;
  for (const auto& [id, v] : g.vertices()) vs.push_back(id);
  std::vector<EdgeId> es;
  for (const auto& [id, e] : g.edges()) es.push_back(id);

  std::vector<Binding> out;
  const std::size_t n = p.nodes.size(), m = p.edges.size();
  std::vector<std::size_t> vi(n, 0), ei(m, 0);
  if (n > 0 && vs.empty()) return out;
  if (m > 0 && es.empty()) return out;

  auto vertex_of = [&](const std::string& b) {
    for (std::size_t i = 0; i < n; ++i)
      if (p.nodes[i].binder == b) return vs[vi[i]];
    return VertexId{~0ull};
  };

  // Odometer over vertex choices, then over edge choices.
  std::function<void(std::size_t)> nodes_at, edges_at;
  nodes_at = [&](std::size_t i) {
    if (i == n) {
      edges_at(0);
      return;
    }
    for (std::size_t k = 0; k < vs.size(); ++k) {
      vi[i] = k;
      nodes_at(i + 1);
    }
  };
  edges_at = [&](std::size_t j) {
    if (j == m) {
      // Check everything at the leaf.
      for (std::size_t i = 0; i < n; ++i) {
        const auto& np = p.nodes[i];
        const Vertex& v = g.vertex(vs[vi[i]]);
        if (np.pinned && *np.pinned != v.id) return;
        if (!labels_ok(v.labels, np.labels) || !props_ok(v.props, np.props)) return;
      }
      std::set<std::uint64_t> used;
      for (std::size_t k = 0; k < m; ++k) {
        const auto& ep = p.edges[k];
        const Edge& e = g.edge(es[ei[k]]);
        if (!used.insert(e.id.value).second) return;
        VertexId s = vertex_of(ep.src), d = vertex_of(ep.dst);
        bool fwd = e.src == s && e.dst == d;
        bool bwd = e.src == d && e.dst == s;
        bool dir_ok = ep.direction == Direction::Out ? fwd : ep.direction == Direction::In ? bwd : (fwd || bwd);
        if (!dir_ok || !labels_ok(e.labels, ep.labels) || !props_ok(e.props, ep.props)) return;
      }
      // Where clauses: a missing property fails the clause either way.
      for (const auto& w : p.where) {
        auto side = [&](const std::string& b, const Key& key) -> std::optional<std::string> {
          for (std::size_t i = 0; i < n; ++i)
            if (p.nodes[i].binder == b) {
              if (key.empty()) return "V" + std::to_string(vs[vi[i]].value);
              const auto& props = g.vertex(vs[vi[i]]).props;
              auto it = props.find(key);
              if (it == props.end()) return std::nullopt;
              return "P" + it->second.to_string() + (it->second.is_text() ? "t" : it->second.is_int() ? "i" : "b");
            }
          for (std::size_t k = 0; k < m; ++k)
            if (p.edges[k].binder == b) {
              if (key.empty()) return "E" + std::to_string(es[ei[k]].value);
              const auto& props = g.edge(es[ei[k]]).props;
              auto it = props.find(key);
              if (it == props.end()) return std::nullopt;
              return "P" + it->second.to_string() + (it->second.is_text() ? "t" : it->second.is_int() ? "i" : "b");
            }
          return std::nullopt;
        };
        auto l = side(w.lhs, w.lhs_key), r = side(w.rhs, w.rhs_key);
        if (!l || !r) return;
        if ((*l == *r) != (w.cmp == Cmp::Eq)) return;
      }
      Binding b;
      for (std::size_t i = 0; i < n; ++i) b.vertices.emplace_back(p.nodes[i].binder, vs[vi[i]]);
      for (std::size_t k = 0; k < m; ++k) b.edges.emplace_back(p.edges[k].binder, es[ei[k]]);
      out.push_back(b);
      return;
    }
    for (std::size_t k = 0; k < es.size(); ++k) {
      ei[j] = k;
      edges_at(j + 1);
    }
  };
  nodes_at(0);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Random graphs and patterns over a small vocabulary so that matches are
// common.

inline const std::vector<std::string>& label_pool() {
  static const std::vector<std::string> pool{"A", "B", "C"};
  return pool;
}

inline Value random_value(std::mt19937& rng) {
  switch (rng() % 3) {
    case 0: return Value(static_cast<int>(rng() % 3));
    case 1: return Value(std::string(1, static_cast<char>('x' + rng() % 2)));
    default: return Value(rng() % 2 == 0);
  }
}

inline PropertyGraph random_graph(std::mt19937& rng, std::size_t max_vertices = 8) {
  PropertyGraph g;
  std::size_t nv = 1 + rng() % max_vertices;
  std::vector<VertexId> ids;
  for (std::size_t i = 0; i < nv; ++i) {
    Labels ls;
    for (const auto& l : label_pool())
      if (rng() % 3 == 0) ls.insert(l);
    PropertyList ps;
    if (rng() % 2) ps.emplace_back("k", random_value(rng));
    if (rng() % 3 == 0) ps.emplace_back("w", random_value(rng));
    ids.push_back(g.add_vertex(ls, ps));
  }
  std::size_t ne = rng() % (2 * nv + 1);
  for (std::size_t i = 0; i < ne; ++i) {
    Labels ls;
    if (rng() % 2) ls.insert(label_pool()[rng() % 2]);
    PropertyList ps;
    if (rng() % 2) ps.emplace_back("k", random_value(rng));
    g.add_edge(ids[rng() % nv], ids[rng() % nv], ls, ps);
  }
  // Some churn so ids are not dense.
  if (rng() % 4 == 0 && g.vertex_count() > 1) g.remove_vertex(ids[rng() % nv]);
  return g;
}

inline GraphPattern random_pattern(std::mt19937& rng, const PropertyGraph& g) {
  GraphPattern p;
  std::size_t nn = 1 + rng() % 3;
  for (std::size_t i = 0; i < nn; ++i) {
    NodePattern np;
    np.binder = "n" + std::to_string(i);
    if (rng() % 3 == 0) np.labels.insert(label_pool()[rng() % 3]);
    if (rng() % 4 == 0) np.props.push_back({"k", rng() % 3 == 0 ? Cmp::Ne : Cmp::Eq, random_value(rng)});
    if (rng() % 10 == 0 && g.vertex_count() > 0) {
      auto it = g.vertices().begin();
      std::advance(it, static_cast<long>(rng() % g.vertex_count()));
      np.pinned = it->first;
    }
    p.nodes.push_back(np);
  }
  std::size_t ne = rng() % 3;
  for (std::size_t j = 0; j < ne; ++j) {
    EdgePattern ep;
    if (rng() % 2) ep.binder = "e" + std::to_string(j);
    ep.src = p.nodes[rng() % nn].binder;
    ep.dst = p.nodes[rng() % nn].binder;
    ep.direction = static_cast<Direction>(rng() % 3);
    if (rng() % 3 == 0) ep.labels.insert(label_pool()[rng() % 2]);
    if (rng() % 4 == 0) ep.props.push_back({"k", Cmp::Eq, random_value(rng)});
    p.edges.push_back(ep);
  }
  if (rng() % 3 == 0) {
    WhereClause w;
    w.lhs = p.nodes[rng() % nn].binder;
    w.rhs = p.nodes[rng() % nn].binder;
    w.lhs_key = rng() % 3 ? "k" : "";
    w.rhs_key = w.lhs_key.empty() ? "" : (rng() % 2 ? "k" : "w");
    w.cmp = rng() % 2 ? Cmp::Eq : Cmp::Ne;
    p.where.push_back(w);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Formulas as plain trees parsed from S-expressions by hand.

struct Tree {
  std::string head;  // atom name or operator
  std::vector<Tree> kids;
  bool operator<(const Tree& o) const {
    if (head != o.head) return head < o.head;
    return kids < o.kids;
  }
  bool operator==(const Tree& o) const { return head == o.head && kids == o.kids; }
};

inline Tree parse_tree(const std::string& s) {
  std::size_t i = 0;
  std::function<Tree()> go = [&]() -> Tree {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    Tree t;
    if (s[i] == '(') {
      ++i;
      while (std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      while (s[i] != ' ' && s[i] != ')') t.head += s[i++];
      for (;;) {
        while (std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (s[i] == ')') {
          ++i;
          break;
        }
        t.kids.push_back(go());
      }
    } else {
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ')') t.head += s[i++];
    }
    return t;
  };
  return go();
}

inline std::string show_tree(const Tree& t) {
  if (t.kids.empty()) return t.head;
  std::string out = "(" + t.head;
  for (const auto& k : t.kids) out += " " + show_tree(k);
  return out + ")";
}

inline void collect_subtrees(const Tree& t, std::set<Tree>& out) {
  out.insert(t);
  for (const auto& k : t.kids) collect_subtrees(k, out);
}

inline std::set<std::string> subformula_strings(const std::string& sexpr) {
  std::set<Tree> ts;
  collect_subtrees(parse_tree(sexpr), ts);
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(show_tree(t));
  return out;
}

inline void atoms_in(const Tree& t, std::set<std::string>& out) {
  if (t.kids.empty()) out.insert(t.head);
  for (const auto& k : t.kids) atoms_in(k, out);
}

inline bool eval_tree(const Tree& t, const std::map<std::string, bool>& v) {
  if (t.kids.empty()) return v.at(t.head);
  if (t.head == "not") return !eval_tree(t.kids[0], v);
  if (t.head == "and") return eval_tree(t.kids[0], v) && eval_tree(t.kids[1], v);
  if (t.head == "or") return eval_tree(t.kids[0], v) || eval_tree(t.kids[1], v);
  if (t.head == "->") return !eval_tree(t.kids[0], v) || eval_tree(t.kids[1], v);
  throw std::runtime_error("truth table: unsupported operator " + t.head);
}

// Whether the hypotheses entail the conclusion under every valuation.
inline bool entails(const std::vector<std::string>& hyps, const std::string& concl) {
  std::vector<Tree> hs;
  for (const auto& h : hyps) hs.push_back(parse_tree(h));
  Tree c = parse_tree(concl);
  std::set<std::string> atoms;
  for (const auto& h : hs) atoms_in(h, atoms);
  atoms_in(c, atoms);
  std::vector<std::string> as(atoms.begin(), atoms.end());
  for (std::size_t bits = 0; bits < (std::size_t{1} << as.size()); ++bits) {
    std::map<std::string, bool> v;
    for (std::size_t i = 0; i < as.size(); ++i) v[as[i]] = (bits >> i) & 1;
    bool all = true;
    for (const auto& h : hs) all = all && eval_tree(h, v);
    if (all && !eval_tree(c, v)) return false;
  }
  return true;
}

inline bool tautology(const std::string& sexpr) { return entails({}, sexpr); }

// Random formula text over the given atoms and binary/unary operators.
inline std::string random_sexpr(std::mt19937& rng, const std::vector<std::string>& atoms, int depth,
                                bool with_not = true) {
  if (depth == 0 || rng() % 3 == 0) return atoms[rng() % atoms.size()];
  static const char* bin[] = {"->", "and", "or"};
  if (with_not && rng() % 4 == 0) return "(not " + random_sexpr(rng, atoms, depth - 1, with_not) + ")";
  return std::string("(") + bin[rng() % 3] + " " + random_sexpr(rng, atoms, depth - 1, with_not) + " " +
         random_sexpr(rng, atoms, depth - 1, with_not) + ")";
}

// A short script of edits on the pattern's binders.
inline TransformScript random_script(std::mt19937& rng, const GraphPattern& p) {
  TransformScript s;
  std::vector<std::string> binders;
  for (const auto& n : p.nodes) binders.push_back(n.binder);
  std::size_t n = 1 + rng() % 4;
  for (std::size_t i = 0; i < n; ++i) {
    std::string target = binders[rng() % binders.size()];
    switch (rng() % 6) {
      case 0: {
        std::string nb = "new" + std::to_string(i);
        s.actions.push_back(action::CreateVertex{nb, {"A"}, {{"k", 9}}});
        binders.push_back(nb);
        break;
      }
      case 1:
        s.actions.push_back(action::CreateEdge{"", target, binders[rng() % binders.size()], {"B"}, {}});
        break;
      case 2: s.actions.push_back(action::SetProperty{target, "k", random_value(rng)}); break;
      case 3: s.actions.push_back(action::RemoveProperty{target, "w"}); break;
      case 4: s.actions.push_back(action::AddLabel{target, "C"}); break;
      default:
        // Sometimes refer to nothing, which must fail the whole script.
        if (rng() % 3 == 0) s.actions.push_back(action::AddLabel{"missing", "C"});
        else s.actions.push_back(action::RemoveLabel{target, "A"});
    }
  }
  return s;
}

}  // namespace oracle
