/*
 * Copyright 2026 The ldpembed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef LDPEMBED_GRAPH_HPP_
#define LDPEMBED_GRAPH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ldpembed {

using NodeId = std::int64_t;
using Edge = std::pair<NodeId, NodeId>;

// Immutable undirected simple graph in compressed sparse row form.
//
// Every edge {u, v} is stored twice (v in N(u) and u in N(v)); neighbor
// lists are sorted ascending and contain no self-loops or duplicates.
// Isolated nodes are allowed.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Symmetrizes, deduplicates and drops self-loops. Throws InputError when an
  // endpoint is outside [0, n).
  static Graph FromEdges(NodeId n, std::span<const Edge> edges);

  NodeId num_nodes() const { return static_cast<NodeId>(offsets_.size()) - 1; }
  std::int64_t num_edges() const {
    return static_cast<std::int64_t>(neighbors_.size()) / 2;
  }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  std::int64_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const std::int64_t> offsets() const { return offsets_; }
  std::span<const NodeId> flat_neighbors() const { return neighbors_; }
  std::vector<std::int64_t> degrees() const;

  bool HasEdge(NodeId u, NodeId v) const;

  // Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<Edge> Edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::int64_t> offsets_;
  std::vector<NodeId> neighbors_;
};

// Edge-list text format: one `u<ws>v` pair per line, `#` comment lines,
// optional leading `n=<count>` header. Without a header n = 1 + max id.
Graph LoadEdgeList(const std::string& path);
Graph ParseEdgeList(const std::string& text, const std::string& source = "<text>");

// Writes the `n=` header followed by each edge once.
void SaveEdgeList(const Graph& g, const std::string& path);
std::string FormatEdgeList(const Graph& g);

}  // namespace ldpembed

#endif  // LDPEMBED_GRAPH_HPP_
