#include "glf/graphstore.hpp"

#include <algorithm>
#include <functional>

namespace glf::graph {

namespace {

const std::set<EdgeId> kNoEdges;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string id_text(VertexId v) { return std::to_string(v.value); }
std::string id_text(EdgeId e) { return std::to_string(e.value); }

}  // namespace

std::string Value::to_string() const {
  return std::visit(overloaded{[](const std::string& s) { return s; },
                               [](std::int64_t i) { return std::to_string(i); },
                               [](bool b) { return std::string(b ? "true" : "false"); }},
                    v_);
}

Properties validated_properties(const PropertyList& props) {
  Properties out;
  for (const auto& [k, v] : props) {
    if (!out.emplace(k, v).second) throw Error(Errc::DuplicateKey, "property key '" + k + "' given twice");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Primitive (unjournaled) storage operations

void PropertyGraph::insert_vertex(Vertex v) {
  for (const auto& l : v.labels) label_index_[l].insert(v.id);
  out_[v.id];
  in_[v.id];
  vertices_.emplace(v.id, std::move(v));
  ++revision_;
}

void PropertyGraph::insert_edge(Edge e) {
  out_[e.src].insert(e.id);
  in_[e.dst].insert(e.id);
  edges_.emplace(e.id, std::move(e));
  ++revision_;
}

void PropertyGraph::erase_vertex(VertexId v) {
  auto it = vertices_.find(v);
  for (const auto& l : it->second.labels) {
    auto li = label_index_.find(l);
    li->second.erase(v);
    if (li->second.empty()) label_index_.erase(li);
  }
  vertices_.erase(it);
  out_.erase(v);
  in_.erase(v);
  ++revision_;
}

void PropertyGraph::erase_edge(EdgeId e) {
  auto it = edges_.find(e);
  out_[it->second.src].erase(e);
  in_[it->second.dst].erase(e);
  edges_.erase(it);
  ++revision_;
}

Vertex& PropertyGraph::vertex_mut(VertexId v) {
  auto it = vertices_.find(v);
  if (it == vertices_.end()) throw Error(Errc::UnknownVertex, "vertex " + id_text(v));
  return it->second;
}

Edge& PropertyGraph::edge_mut(EdgeId e) {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw Error(Errc::UnknownEdge, "edge " + id_text(e));
  return it->second;
}

const Vertex& PropertyGraph::vertex(VertexId v) const {
  auto it = vertices_.find(v);
  if (it == vertices_.end()) throw Error(Errc::UnknownVertex, "vertex " + id_text(v));
  return it->second;
}

const Edge& PropertyGraph::edge(EdgeId e) const {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw Error(Errc::UnknownEdge, "edge " + id_text(e));
  return it->second;
}

const std::set<EdgeId>& PropertyGraph::out_edges(VertexId v) const {
  auto it = out_.find(v);
  return it == out_.end() ? kNoEdges : it->second;
}

const std::set<EdgeId>& PropertyGraph::in_edges(VertexId v) const {
  auto it = in_.find(v);
  return it == in_.end() ? kNoEdges : it->second;
}

std::vector<VertexId> PropertyGraph::vertices_with_label(const Label& label) const {
  auto it = label_index_.find(label);
  if (it == label_index_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

const Value* PropertyGraph::property(VertexId v, const Key& key) const {
  const auto& props = vertex(v).props;
  auto it = props.find(key);
  return it == props.end() ? nullptr : &it->second;
}

const Value* PropertyGraph::property(EdgeId e, const Key& key) const {
  const auto& props = edge(e).props;
  auto it = props.find(key);
  return it == props.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Journaled mutations

VertexId PropertyGraph::add_vertex(Labels labels, const PropertyList& props) {
  Vertex v{VertexId{next_vertex_}, std::move(labels), validated_properties(props)};
  ++next_vertex_;
  VertexId id = v.id;
  insert_vertex(std::move(v));
  journal_.emplace_back(AddedVertex{id});
  return id;
}

EdgeId PropertyGraph::add_edge(VertexId src, VertexId dst, Labels labels, const PropertyList& props) {
  if (!has_vertex(src)) throw Error(Errc::UnknownVertex, "edge source " + id_text(src));
  if (!has_vertex(dst)) throw Error(Errc::UnknownVertex, "edge target " + id_text(dst));
  Edge e{EdgeId{next_edge_}, src, dst, std::move(labels), validated_properties(props)};
  ++next_edge_;
  EdgeId id = e.id;
  insert_edge(std::move(e));
  journal_.emplace_back(AddedEdge{id});
  return id;
}

void PropertyGraph::remove_edge(EdgeId e) {
  Edge copy = edge(e);
  erase_edge(e);
  journal_.emplace_back(RemovedEdge{std::move(copy)});
}

void PropertyGraph::remove_vertex(VertexId v) {
  Vertex copy = vertex(v);
  std::set<EdgeId> incident = out_edges(v);
  incident.insert(in_edges(v).begin(), in_edges(v).end());
  for (EdgeId e : incident) remove_edge(e);
  erase_vertex(v);
  journal_.emplace_back(RemovedVertex{std::move(copy)});
}

void PropertyGraph::set_property(VertexId v, const Key& key, Value value) {
  auto& props = vertex_mut(v).props;
  std::optional<Value> old;
  if (auto it = props.find(key); it != props.end()) old = it->second;
  props[key] = std::move(value);
  ++revision_;
  journal_.emplace_back(VertexPropChanged{v, key, std::move(old)});
}

void PropertyGraph::set_property(EdgeId e, const Key& key, Value value) {
  auto& props = edge_mut(e).props;
  std::optional<Value> old;
  if (auto it = props.find(key); it != props.end()) old = it->second;
  props[key] = std::move(value);
  ++revision_;
  journal_.emplace_back(EdgePropChanged{e, key, std::move(old)});
}

void PropertyGraph::remove_property(VertexId v, const Key& key) {
  auto& props = vertex_mut(v).props;
  auto it = props.find(key);
  if (it == props.end()) return;
  std::optional<Value> old = it->second;
  props.erase(it);
  ++revision_;
  journal_.emplace_back(VertexPropChanged{v, key, std::move(old)});
}

void PropertyGraph::remove_property(EdgeId e, const Key& key) {
  auto& props = edge_mut(e).props;
  auto it = props.find(key);
  if (it == props.end()) return;
  std::optional<Value> old = it->second;
  props.erase(it);
  ++revision_;
  journal_.emplace_back(EdgePropChanged{e, key, std::move(old)});
}

void PropertyGraph::add_label(VertexId v, const Label& label) {
  if (!vertex_mut(v).labels.insert(label).second) return;
  label_index_[label].insert(v);
  ++revision_;
  journal_.emplace_back(VertexLabelChanged{v, label, true});
}

void PropertyGraph::remove_label(VertexId v, const Label& label) {
  if (vertex_mut(v).labels.erase(label) == 0) return;
  auto li = label_index_.find(label);
  li->second.erase(v);
  if (li->second.empty()) label_index_.erase(li);
  ++revision_;
  journal_.emplace_back(VertexLabelChanged{v, label, false});
}

void PropertyGraph::add_label(EdgeId e, const Label& label) {
  if (!edge_mut(e).labels.insert(label).second) return;
  ++revision_;
  journal_.emplace_back(EdgeLabelChanged{e, label, true});
}

void PropertyGraph::remove_label(EdgeId e, const Label& label) {
  if (edge_mut(e).labels.erase(label) == 0) return;
  ++revision_;
  journal_.emplace_back(EdgeLabelChanged{e, label, false});
}

void PropertyGraph::revert(const JournalOp& op) {
  std::visit(
      overloaded{
          [&](const AddedVertex& a) { erase_vertex(a.id); },
          [&](const AddedEdge& a) { erase_edge(a.id); },
          [&](const RemovedVertex& r) { insert_vertex(r.data); },
          [&](const RemovedEdge& r) { insert_edge(r.data); },
          [&](const VertexPropChanged& c) {
            auto& props = vertices_.at(c.id).props;
            if (c.old) props[c.key] = *c.old;
            else props.erase(c.key);
            ++revision_;
          },
          [&](const EdgePropChanged& c) {
            auto& props = edges_.at(c.id).props;
            if (c.old) props[c.key] = *c.old;
            else props.erase(c.key);
            ++revision_;
          },
          [&](const VertexLabelChanged& c) {
            auto& labels = vertices_.at(c.id).labels;
            if (c.added) {
              labels.erase(c.label);
              auto li = label_index_.find(c.label);
              li->second.erase(c.id);
              if (li->second.empty()) label_index_.erase(li);
            } else {
              labels.insert(c.label);
              label_index_[c.label].insert(c.id);
            }
            ++revision_;
          },
          [&](const EdgeLabelChanged& c) {
            auto& labels = edges_.at(c.id).labels;
            if (c.added) labels.erase(c.label);
            else labels.insert(c.label);
            ++revision_;
          },
      },
      op);
}

void PropertyGraph::rollback(Savepoint sp) {
  while (journal_.size() > sp.position) {
    revert(journal_.back());
    journal_.pop_back();
  }
}

// ---------------------------------------------------------------------------
// Documents

namespace {

nlohmann::json props_to_json(const Properties& props) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : props) {
    if (v.is_text()) out[k] = v.text();
    else if (v.is_int()) out[k] = v.integer();
    else out[k] = v.boolean();
  }
  return out;
}

PropertyList props_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::ImportError, "props must be an object");
  PropertyList out;
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) out.emplace_back(k, v.get<std::string>());
    else if (v.is_boolean()) out.emplace_back(k, v.get<bool>());
    else if (v.is_number_integer()) out.emplace_back(k, v.get<std::int64_t>());
    else throw Error(Errc::ImportError, "property '" + k + "' is not text, integer or boolean");
  }
  return out;
}

Labels labels_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(Errc::ImportError, "labels must be an array");
  Labels out;
  for (const auto& l : j) {
    if (!l.is_string()) throw Error(Errc::ImportError, "labels must be strings");
    out.insert(l.get<std::string>());
  }
  return out;
}

std::uint64_t id_from_json(const nlohmann::json& j) {
  if (!j.is_string()) throw Error(Errc::ImportError, "ids must be strings");
  const auto& s = j.get_ref<const std::string&>();
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw Error(Errc::ImportError, "malformed id '" + s + "'");
  return std::stoull(s);
}

}  // namespace

nlohmann::json PropertyGraph::to_document() const {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& [id, v] : vertices_) {
    vs.push_back({{"id", id_text(id)}, {"labels", v.labels}, {"props", props_to_json(v.props)}});
  }
  nlohmann::json es = nlohmann::json::array();
  for (const auto& [id, e] : edges_) {
    es.push_back({{"id", id_text(id)},
                  {"src", id_text(e.src)},
                  {"dst", id_text(e.dst)},
                  {"labels", e.labels},
                  {"props", props_to_json(e.props)}});
  }
  return {{"version", 1}, {"vertices", std::move(vs)}, {"edges", std::move(es)}};
}

PropertyGraph PropertyGraph::from_document(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || doc.value("version", 0) != 1)
      throw Error(Errc::ImportError, "expected a version 1 graph document");
    PropertyGraph g;
    for (const auto& jv : doc.at("vertices")) {
      VertexId id{id_from_json(jv.at("id"))};
      if (g.has_vertex(id)) throw Error(Errc::ImportError, "duplicate vertex id " + id_text(id));
      Properties props;
      try {
        props = validated_properties(props_from_json(jv.at("props")));
      } catch (const Error& e) {
        throw Error(Errc::ImportError, e.what());
      }
      g.insert_vertex(Vertex{id, labels_from_json(jv.at("labels")), std::move(props)});
      g.next_vertex_ = std::max(g.next_vertex_, id.value + 1);
    }
    for (const auto& je : doc.at("edges")) {
      EdgeId id{id_from_json(je.at("id"))};
      if (g.has_edge(id)) throw Error(Errc::ImportError, "duplicate edge id " + id_text(id));
      VertexId src{id_from_json(je.at("src"))};
      VertexId dst{id_from_json(je.at("dst"))};
      if (!g.has_vertex(src) || !g.has_vertex(dst))
        throw Error(Errc::ImportError, "edge " + id_text(id) + " has a dangling endpoint");
      Properties props;
      try {
        props = validated_properties(props_from_json(je.at("props")));
      } catch (const Error& e) {
        throw Error(Errc::ImportError, e.what());
      }
      g.insert_edge(Edge{id, src, dst, labels_from_json(je.at("labels")), std::move(props)});
      g.next_edge_ = std::max(g.next_edge_, id.value + 1);
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ImportError, e.what());
  }
}

PropertyGraph PropertyGraph::compacted() const {
  PropertyGraph g;
  std::map<VertexId, VertexId> renamed;
  for (const auto& [id, v] : vertices_) {
    VertexId fresh{g.next_vertex_++};
    renamed.emplace(id, fresh);
    g.insert_vertex(Vertex{fresh, v.labels, v.props});
  }
  for (const auto& [id, e] : edges_) {
    g.insert_edge(Edge{EdgeId{g.next_edge_++}, renamed.at(e.src), renamed.at(e.dst), e.labels, e.props});
  }
  return g;
}

// ---------------------------------------------------------------------------
// Pattern matching

void GraphPattern::validate() const {
  std::set<std::string> node_binders;
  std::set<std::string> all_binders;
  for (const auto& n : nodes) {
    if (n.binder.empty()) throw Error(Errc::InvalidRef, "node binders must be named");
    if (!all_binders.insert(n.binder).second) throw Error(Errc::InvalidRef, "duplicate binder " + n.binder);
    node_binders.insert(n.binder);
  }
  for (const auto& e : edges) {
    if (!node_binders.contains(e.src) || !node_binders.contains(e.dst))
      throw Error(Errc::InvalidRef, "edge pattern references an undeclared node binder");
    if (!e.binder.empty() && !all_binders.insert(e.binder).second)
      throw Error(Errc::InvalidRef, "duplicate binder " + e.binder);
  }
  for (const auto& w : where) {
    if (!all_binders.contains(w.lhs) || !all_binders.contains(w.rhs))
      throw Error(Errc::InvalidRef, "where clause references an undeclared binder");
  }
}

std::optional<VertexId> Binding::vertex(std::string_view binder) const {
  for (const auto& [name, id] : vertices)
    if (name == binder) return id;
  return std::nullopt;
}

std::optional<EdgeId> Binding::edge(std::string_view binder) const {
  for (const auto& [name, id] : edges)
    if (name == binder) return id;
  return std::nullopt;
}

namespace {

bool satisfies(const Properties& props, const std::vector<PropertyConstraint>& constraints) {
  for (const auto& c : constraints) {
    auto it = props.find(c.key);
    if (it == props.end()) return false;
    if ((it->second == c.value) != (c.cmp == Cmp::Eq)) return false;
  }
  return true;
}

bool has_labels(const Labels& have, const Labels& want) {
  return std::includes(have.begin(), have.end(), want.begin(), want.end());
}

class Matcher {
 public:
  Matcher(const PropertyGraph& g, const GraphPattern& p) : g_(g), p_(p) {
    p_.validate();
    for (std::size_t i = 0; i < p_.nodes.size(); ++i) node_index_[p_.nodes[i].binder] = i;
    // An edge pattern becomes checkable once the later of its endpoints is bound.
    edges_closing_at_.resize(p_.nodes.size());
    for (std::size_t e = 0; e < p_.edges.size(); ++e) {
      std::size_t s = node_index_.at(p_.edges[e].src);
      std::size_t d = node_index_.at(p_.edges[e].dst);
      edges_closing_at_[std::max(s, d)].push_back(e);
    }
    assigned_.resize(p_.nodes.size());
    edge_assigned_.resize(p_.edges.size());
  }

  void run(const std::function<void(const Binding&)>& emit) {
    emit_ = &emit;
    bind_node(0);
  }

 private:
  std::vector<VertexId> node_candidates(std::size_t i) const {
    const auto& np = p_.nodes[i];
    std::vector<VertexId> base;
    if (np.pinned) {
      if (g_.has_vertex(*np.pinned)) base.push_back(*np.pinned);
      return base;
    }
    // Prefer the neighbourhood of an already bound endpoint.
    for (const auto& ep : p_.edges) {
      std::size_t s = node_index_.at(ep.src), d = node_index_.at(ep.dst);
      std::optional<VertexId> anchor;
      bool anchor_is_src = false;
      if (s < i && d == i) { anchor = assigned_[s]; anchor_is_src = true; }
      else if (d < i && s == i) { anchor = assigned_[d]; anchor_is_src = false; }
      if (!anchor) continue;
      std::set<VertexId> nb;
      auto collect = [&](bool outgoing) {
        for (EdgeId e : outgoing ? g_.out_edges(*anchor) : g_.in_edges(*anchor)) {
          const Edge& ed = g_.edge(e);
          nb.insert(outgoing ? ed.dst : ed.src);
        }
      };
      bool want_out = (ep.direction == Direction::Out) == anchor_is_src;
      if (ep.direction == Direction::Either) { collect(true); collect(false); }
      else collect(want_out);
      return {nb.begin(), nb.end()};
    }
    if (!np.labels.empty()) {
      std::vector<VertexId> best;
      bool first = true;
      for (const auto& l : np.labels) {
        auto ids = g_.vertices_with_label(l);
        if (first || ids.size() < best.size()) best = std::move(ids);
        first = false;
      }
      return best;
    }
    for (const auto& [id, v] : g_.vertices()) base.push_back(id);
    return base;
  }

  std::vector<EdgeId> edge_candidates(std::size_t e) const {
    const auto& ep = p_.edges[e];
    VertexId s = assigned_[node_index_.at(ep.src)];
    VertexId d = assigned_[node_index_.at(ep.dst)];
    std::set<EdgeId> found;
    auto scan = [&](VertexId from, VertexId to) {
      for (EdgeId id : g_.out_edges(from)) {
        const Edge& ed = g_.edge(id);
        if (ed.dst == to && has_labels(ed.labels, ep.labels) && satisfies(ed.props, ep.props)) found.insert(id);
      }
    };
    if (ep.direction != Direction::In) scan(s, d);
    if (ep.direction != Direction::Out) scan(d, s);
    return {found.begin(), found.end()};
  }

  void bind_node(std::size_t i) {
    if (i == p_.nodes.size()) {
      bind_edge(0);
      return;
    }
    const auto& np = p_.nodes[i];
    for (VertexId v : node_candidates(i)) {
      const Vertex& vx = g_.vertex(v);
      if (!has_labels(vx.labels, np.labels) || !satisfies(vx.props, np.props)) continue;
      assigned_[i] = v;
      bool viable = true;
      for (std::size_t e : edges_closing_at_[i]) {
        if (edge_candidates(e).empty()) { viable = false; break; }
      }
      if (viable) bind_node(i + 1);
    }
  }

  void bind_edge(std::size_t e) {
    if (e == p_.edges.size()) {
      if (where_holds()) (*emit_)(current());
      return;
    }
    for (EdgeId id : edge_candidates(e)) {
      if (std::find(edge_assigned_.begin(), edge_assigned_.begin() + static_cast<long>(e), id) !=
          edge_assigned_.begin() + static_cast<long>(e))
        continue;
      edge_assigned_[e] = id;
      bind_edge(e + 1);
    }
  }

  // Returns the bound element's property, or its identity when key is empty.
  std::optional<Value> lookup(const std::string& binder, const Key& key) const {
    if (auto it = node_index_.find(binder); it != node_index_.end()) {
      VertexId v = assigned_[it->second];
      if (key.empty()) return Value("v" + std::to_string(v.value));
      const Value* val = g_.property(v, key);
      return val ? std::optional<Value>(*val) : std::nullopt;
    }
    for (std::size_t e = 0; e < p_.edges.size(); ++e) {
      if (p_.edges[e].binder != binder) continue;
      if (key.empty()) return Value("e" + std::to_string(edge_assigned_[e].value));
      const Value* val = g_.property(edge_assigned_[e], key);
      return val ? std::optional<Value>(*val) : std::nullopt;
    }
    return std::nullopt;
  }

  bool where_holds() const {
    for (const auto& w : p_.where) {
      auto l = lookup(w.lhs, w.lhs_key);
      auto r = lookup(w.rhs, w.rhs_key);
      if (!l || !r) return false;
      if ((*l == *r) != (w.cmp == Cmp::Eq)) return false;
    }
    return true;
  }

  Binding current() const {
    Binding b;
    for (std::size_t i = 0; i < p_.nodes.size(); ++i) b.vertices.emplace_back(p_.nodes[i].binder, assigned_[i]);
    for (std::size_t e = 0; e < p_.edges.size(); ++e) b.edges.emplace_back(p_.edges[e].binder, edge_assigned_[e]);
    return b;
  }

  const PropertyGraph& g_;
  const GraphPattern& p_;
  std::map<std::string, std::size_t> node_index_;
  std::vector<std::vector<std::size_t>> edges_closing_at_;
  std::vector<VertexId> assigned_;
  std::vector<EdgeId> edge_assigned_;
  const std::function<void(const Binding&)>* emit_ = nullptr;
};

}  // namespace

std::vector<Binding> match(const PropertyGraph& g, const GraphPattern& p) {
  std::vector<Binding> out;
  Matcher m(g, p);
  m.run([&](const Binding& b) { out.push_back(b); });
  // Neighbourhood-driven candidates are already sorted per level, but keep
  // the ordering guarantee independent of the search order.
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_matches(const PropertyGraph& g, const GraphPattern& p) {
  std::size_t n = 0;
  Matcher m(g, p);
  m.run([&](const Binding&) { ++n; });
  return n;
}

// ---------------------------------------------------------------------------
// Transformations

TransformResult apply_transform(PropertyGraph& g, const GraphPattern& p, const TransformScript& t,
                                std::size_t which) {
  auto bindings = match(g, p);
  if (which >= bindings.size()) throw Error(Errc::NoMatch, "pattern has no binding #" + std::to_string(which));

  TransformResult result;
  result.binding = bindings[which];
  result.undo = g.savepoint();

  auto vertex_of = [&](const std::string& binder) -> VertexId {
    if (auto v = result.binding.vertex(binder)) return *v;
    if (auto it = result.created_vertices.find(binder); it != result.created_vertices.end()) return it->second;
    throw Error(Errc::TransformFailed, "unknown vertex binder '" + binder + "'");
  };
  auto element_of = [&](const std::string& binder) -> std::variant<VertexId, EdgeId> {
    if (auto e = result.binding.edge(binder)) return *e;
    if (auto it = result.created_edges.find(binder); it != result.created_edges.end()) return it->second;
    return vertex_of(binder);
  };
  auto fresh = [&](const std::string& binder) {
    if (binder.empty()) return;
    if (result.binding.vertex(binder) || result.binding.edge(binder) || result.created_vertices.contains(binder) ||
        result.created_edges.contains(binder))
      throw Error(Errc::TransformFailed, "binder '" + binder + "' is already bound");
  };

  try {
    for (const auto& act : t.actions) {
      std::visit(overloaded{
                     [&](const action::CreateVertex& a) {
                       fresh(a.binder);
                       VertexId v = g.add_vertex(a.labels, a.props);
                       if (!a.binder.empty()) result.created_vertices[a.binder] = v;
                     },
                     [&](const action::CreateEdge& a) {
                       fresh(a.binder);
                       EdgeId e = g.add_edge(vertex_of(a.src), vertex_of(a.dst), a.labels, a.props);
                       if (!a.binder.empty()) result.created_edges[a.binder] = e;
                     },
                     [&](const action::SetProperty& a) {
                       std::visit([&](auto id) { g.set_property(id, a.key, a.value); }, element_of(a.binder));
                     },
                     [&](const action::RemoveProperty& a) {
                       std::visit([&](auto id) { g.remove_property(id, a.key); }, element_of(a.binder));
                     },
                     [&](const action::AddLabel& a) {
                       std::visit([&](auto id) { g.add_label(id, a.label); }, element_of(a.binder));
                     },
                     [&](const action::RemoveLabel& a) {
                       std::visit([&](auto id) { g.remove_label(id, a.label); }, element_of(a.binder));
                     },
                 },
                 act);
    }
  } catch (const Error& e) {
    g.rollback(result.undo);
    if (e.code() == Errc::TransformFailed) throw;
    throw Error(Errc::TransformFailed, e.what());
  }
  return result;
}

}  // namespace glf::graph
