// rulesynth/pdg.hpp - program dependence graph data model.
//
// A Pdg is an immutable labeled graph of data nodes (values, literals) and
// action nodes (calls, operators, control structures). Nodes are addressed
// by opaque string ids; internally the graph keeps dense indices so that
// matchers and the aligner can work on integers.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rulesynth {

enum class NodeKind { Data, Action };

enum class EdgeKind { Recv, Para, Def, Dep, Cond, Throw };

enum class ChangeTag { None, Unchanged, Deleted, Added };

/// Edge label. Para carries the 0-based parameter position; every other
/// kind ignores `para_index` (kept at 0).
struct EdgeLabel {
  EdgeKind kind = EdgeKind::Dep;
  int para_index = 0;

  static EdgeLabel recv() { return {EdgeKind::Recv, 0}; }
  static EdgeLabel para(int i) { return {EdgeKind::Para, i}; }
  static EdgeLabel def() { return {EdgeKind::Def, 0}; }
  static EdgeLabel dep() { return {EdgeKind::Dep, 0}; }
  static EdgeLabel cond() { return {EdgeKind::Cond, 0}; }
  static EdgeLabel thrw() { return {EdgeKind::Throw, 0}; }

  friend auto operator<=>(const EdgeLabel&, const EdgeLabel&) = default;
};

/// Short form used in rules and renderings: recv, para0, para1, def, ...
std::string to_string(EdgeLabel label);
/// Inverse of to_string(EdgeLabel); also accepts bare "para" (index 0).
std::optional<EdgeLabel> parse_edge_label(std::string_view text);

std::string_view to_string(NodeKind kind);
std::string_view to_string(ChangeTag tag);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Data;
  std::string label;  // operation for actions, optional for data
  std::optional<std::string> data_type;
  std::optional<std::string> data_value;
  std::optional<int> num_para;  // actions only
  std::optional<std::string> declaring_type;  // static calls only
  ChangeTag change_tag = ChangeTag::None;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  std::string src;
  std::string dst;
  EdgeLabel label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Origin {
  std::string file;
  std::string method;
  int line = 0;

  friend bool operator==(const Origin&, const Origin&) = default;
};

class Pdg {
 public:
  Pdg() = default;
  Pdg(std::vector<Node> nodes, std::vector<Edge> edges, std::optional<Origin> origin = std::nullopt);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::optional<Origin>& origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Like index_of but throws std::out_of_range for unknown ids.
  std::size_t at(std::string_view id) const;
  const Node& node(std::size_t index) const { return nodes_.at(index); }

  /// Indices into edges() of edges leaving / entering a node. Edges with a
  /// dangling endpoint are not indexed.
  const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_.at(node); }
  const std::vector<std::size_t>& in_edges(std::size_t node) const { return in_.at(node); }
  /// Endpoint indices of edge `e`, if both endpoints resolve.
  std::optional<std::pair<std::size_t, std::size_t>> endpoints(std::size_t e) const;

  bool has_edge(std::size_t src, std::size_t dst, EdgeLabel label) const;

  /// Short human-readable description of where the graph came from.
  std::string describe() const;

  Pdg with_origin(std::optional<Origin> origin) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::optional<Origin> origin_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> endpoints_;
};

/// Lists every invariant violation in `g`; empty iff the graph is well formed.
std::vector<std::string> validate(const Pdg& g);

/// Nodes adjacent to `id` through any edge, in either direction, sorted by
/// node index. Throws std::out_of_range for an unknown id.
std::vector<std::string> neighbors(const Pdg& g, std::string_view id);

/// Id-preserving field equality of nodes and edges (edge order ignored).
bool same_graph(const Pdg& a, const Pdg& b);

/// Structural isomorphism on node fields and labeled edges, ignoring ids.
/// Exponential in the worst case; meant for small graphs in tests.
bool isomorphic(const Pdg& a, const Pdg& b);

}  // namespace rulesynth
