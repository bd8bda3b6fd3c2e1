#pragma once

// Embedded labeled property graph: directed multigraph whose vertices and
// edges carry a label set and a key/value property map.  Every mutation is
// journaled so that callers can roll the graph back to any earlier savepoint.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "glf/error.hpp"

namespace glf::graph {

struct VertexId {
  std::uint64_t value = 0;
  friend auto operator<=>(VertexId, VertexId) = default;
};

struct EdgeId {
  std::uint64_t value = 0;
  friend auto operator<=>(EdgeId, EdgeId) = default;
};

using Label = std::string;
using Key = std::string;
using Labels = std::set<Label>;

// Immutable scalar: text, integer or boolean.
class Value {
 public:
  Value() : v_(std::string()) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(std::string_view s) : v_(std::string(s)) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(bool b) : v_(b) {}

  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  const std::string& text() const { return std::get<std::string>(v_); }
  std::int64_t integer() const { return std::get<std::int64_t>(v_); }
  bool boolean() const { return std::get<bool>(v_); }

  std::string to_string() const;

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value&, const Value&) = default;

 private:
  std::variant<std::string, std::int64_t, bool> v_;
};

using Properties = std::map<Key, Value>;
// Caller-supplied property lists may repeat a key; the store rejects that.
using PropertyList = std::vector<std::pair<Key, Value>>;

struct Vertex {
  VertexId id;
  Labels labels;
  Properties props;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
  EdgeId id;
  VertexId src;
  VertexId dst;
  Labels labels;
  Properties props;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Savepoint {
  std::size_t position = 0;
};

class PropertyGraph {
 public:
  VertexId add_vertex(Labels labels, const PropertyList& props = {});
  EdgeId add_edge(VertexId src, VertexId dst, Labels labels, const PropertyList& props = {});

  // Removes the vertex together with all incident edges.
  void remove_vertex(VertexId v);
  void remove_edge(EdgeId e);

  void set_property(VertexId v, const Key& key, Value value);
  void set_property(EdgeId e, const Key& key, Value value);
  void remove_property(VertexId v, const Key& key);
  void remove_property(EdgeId e, const Key& key);
  void add_label(VertexId v, const Label& label);
  void remove_label(VertexId v, const Label& label);
  void add_label(EdgeId e, const Label& label);
  void remove_label(EdgeId e, const Label& label);

  bool has_vertex(VertexId v) const { return vertices_.contains(v); }
  bool has_edge(EdgeId e) const { return edges_.contains(e); }
  const Vertex& vertex(VertexId v) const;
  const Edge& edge(EdgeId e) const;
  const std::map<VertexId, Vertex>& vertices() const { return vertices_; }
  const std::map<EdgeId, Edge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::set<EdgeId>& out_edges(VertexId v) const;
  const std::set<EdgeId>& in_edges(VertexId v) const;
  // Sorted by id.
  std::vector<VertexId> vertices_with_label(const Label& label) const;

  const Value* property(VertexId v, const Key& key) const;
  const Value* property(EdgeId e, const Key& key) const;

  Savepoint savepoint() const { return Savepoint{journal_.size()}; }
  // Reverts every mutation recorded after `sp`.  Ids handed out in between
  // are not reissued.
  void rollback(Savepoint sp);
  std::size_t journal_size() const { return journal_.size(); }

  // Bumped on every mutation, including rollbacks.  Lets callers cache
  // derived views.
  std::uint64_t revision() const { return revision_; }

  // Element-wise equality: same ids, labels, properties and endpoints.
  // Id counters and the journal are not compared.
  friend bool operator==(const PropertyGraph& a, const PropertyGraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

  // Versioned canonical document.  Arrays are sorted by id, so two exports
  // of equal graphs are byte-identical.
  nlohmann::json to_document() const;
  static PropertyGraph from_document(const nlohmann::json& doc);

  // Copy with ids renumbered densely in creation order.  Two graphs built by
  // the same sequence of surviving operations compact to equal graphs.
  PropertyGraph compacted() const;

 private:
  struct AddedVertex { VertexId id; };
  struct AddedEdge { EdgeId id; };
  struct RemovedVertex { Vertex data; };
  struct RemovedEdge { Edge data; };
  struct VertexPropChanged { VertexId id; Key key; std::optional<Value> old; };
  struct EdgePropChanged { EdgeId id; Key key; std::optional<Value> old; };
  struct VertexLabelChanged { VertexId id; Label label; bool added; };
  struct EdgeLabelChanged { EdgeId id; Label label; bool added; };
  using JournalOp = std::variant<AddedVertex, AddedEdge, RemovedVertex, RemovedEdge, VertexPropChanged,
                                 EdgePropChanged, VertexLabelChanged, EdgeLabelChanged>;

  Vertex& vertex_mut(VertexId v);
  Edge& edge_mut(EdgeId e);
  void insert_vertex(Vertex v);
  void insert_edge(Edge e);
  void erase_vertex(VertexId v);
  void erase_edge(EdgeId e);
  void revert(const JournalOp& op);

  std::map<VertexId, Vertex> vertices_;
  std::map<EdgeId, Edge> edges_;
  std::map<VertexId, std::set<EdgeId>> out_;
  std::map<VertexId, std::set<EdgeId>> in_;
  std::map<Label, std::set<VertexId>> label_index_;
  std::vector<JournalOp> journal_;
  std::uint64_t next_vertex_ = 0;
  std::uint64_t next_edge_ = 0;
  std::uint64_t revision_ = 0;
};

Properties validated_properties(const PropertyList& props);

// ---------------------------------------------------------------------------
// Pattern matching

enum class Cmp { Eq, Ne };

struct PropertyConstraint {
  Key key;
  Cmp cmp = Cmp::Eq;
  Value value;
};

struct NodePattern {
  std::string binder;
  Labels labels;
  std::vector<PropertyConstraint> props;
  std::optional<VertexId> pinned;
};

enum class Direction { Out, In, Either };

struct EdgePattern {
  std::string binder;  // may be empty
  std::string src;
  std::string dst;
  Labels labels;
  std::vector<PropertyConstraint> props;
  Direction direction = Direction::Out;
};

// Compares a property of one bound element with a property of another.  An
// empty key compares element identity instead.
struct WhereClause {
  std::string lhs;
  Key lhs_key;
  Cmp cmp = Cmp::Eq;
  std::string rhs;
  Key rhs_key;
};

struct GraphPattern {
  std::vector<NodePattern> nodes;
  std::vector<EdgePattern> edges;
  std::vector<WhereClause> where;

  // Throws InvalidRef for unknown or duplicate binders.
  void validate() const;
};

// Node binders may share a vertex; distinct edge patterns bind distinct
// edges.
struct Binding {
  std::vector<std::pair<std::string, VertexId>> vertices;
  std::vector<std::pair<std::string, EdgeId>> edges;

  std::optional<VertexId> vertex(std::string_view binder) const;
  std::optional<EdgeId> edge(std::string_view binder) const;

  friend bool operator==(const Binding&, const Binding&) = default;
  friend auto operator<=>(const Binding&, const Binding&) = default;
};

// All bindings, ordered lexicographically by (node ids..., edge ids...).
std::vector<Binding> match(const PropertyGraph& g, const GraphPattern& p);
std::size_t count_matches(const PropertyGraph& g, const GraphPattern& p);

// ---------------------------------------------------------------------------
// Transformations

namespace action {
struct CreateVertex { std::string binder; Labels labels; PropertyList props; };
struct CreateEdge { std::string binder; std::string src; std::string dst; Labels labels; PropertyList props; };
struct SetProperty { std::string binder; Key key; Value value; };
struct RemoveProperty { std::string binder; Key key; };
struct AddLabel { std::string binder; Label label; };
struct RemoveLabel { std::string binder; Label label; };
}  // namespace action

using TransformAction = std::variant<action::CreateVertex, action::CreateEdge, action::SetProperty,
                                     action::RemoveProperty, action::AddLabel, action::RemoveLabel>;

struct TransformScript {
  std::vector<TransformAction> actions;
};

struct TransformResult {
  Binding binding;
  std::map<std::string, VertexId> created_vertices;
  std::map<std::string, EdgeId> created_edges;
  Savepoint undo;  // rollback(undo) reverts the whole transform
};

// Runs the script against binding number `which` of match(g, p).  Either
// every action applies or the graph is left untouched.
TransformResult apply_transform(PropertyGraph& g, const GraphPattern& p, const TransformScript& t,
                                std::size_t which = 0);

}  // namespace glf::graph
