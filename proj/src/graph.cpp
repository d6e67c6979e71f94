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
#include "ldpembed/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ldpembed/errors.hpp"

namespace ldpembed {

Graph Graph::FromEdges(NodeId n, std::span<const Edge> edges) {
  if (n < 0) throw InputError("node count must be non-negative");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw InputError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") has an endpoint outside [0, " + std::to_string(n) +
                       ")");
    }
    if (u == v) continue;
    ++counts[u + 1];
    ++counts[v + 1];
  }
  for (NodeId v = 0; v < n; ++v) counts[v + 1] += counts[v];

  std::vector<NodeId> adj(static_cast<std::size_t>(counts[n]));
  std::vector<std::int64_t> cursor(counts.begin(), counts.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    adj[cursor[u]++] = v;
    adj[cursor[v]++] = u;
  }

  // Sort and dedup each list, compacting in place.
  Graph g;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::int64_t out = 0;
  for (NodeId v = 0; v < n; ++v) {
    auto first = adj.begin() + counts[v];
    auto last = adj.begin() + counts[v + 1];
    std::sort(first, last);
    last = std::unique(first, last);
    for (auto it = first; it != last; ++it) adj[out++] = *it;
    g.offsets_[v + 1] = out;
  }
  adj.resize(static_cast<std::size_t>(out));
  g.neighbors_ = std::move(adj);
  return g;
}

std::vector<std::int64_t> Graph::degrees() const {
  std::vector<std::int64_t> d(static_cast<std::size_t>(num_nodes()));
  for (NodeId v = 0; v < num_nodes(); ++v) d[v] = degree(v);
  return d;
}

bool Graph::HasEdge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::Edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(num_edges()));
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

namespace {

bool IsBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) tokens.push_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

bool ParseId(std::string_view tok, NodeId& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && out >= 0;
}

}  // namespace

Graph ParseEdgeList(const std::string& text, const std::string& source) {
  std::vector<Edge> edges;
  NodeId header_n = -1;
  NodeId max_id = -1;
  bool seen_content = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (IsBlank(line)) continue;
    auto tokens = SplitWhitespace(line);
    if (tokens.front().starts_with("#")) continue;

    if (!seen_content && tokens.size() == 1 && tokens[0].starts_with("n=")) {
      if (!ParseId(tokens[0].substr(2), header_n)) {
        throw ParseError(source, line_no, "bad node-count header");
      }
      seen_content = true;
      continue;
    }
    seen_content = true;
    NodeId u = 0;
    NodeId v = 0;
    if (tokens.size() != 2 || !ParseId(tokens[0], u) || !ParseId(tokens[1], v)) {
      throw ParseError(source, line_no,
                       "expected two non-negative integer node ids");
    }
    max_id = std::max({max_id, u, v});
    edges.emplace_back(u, v);
  }

  if (header_n < 0 && edges.empty()) {
    throw ParseError(source, 0, "empty edge list");
  }
  NodeId n = header_n >= 0 ? header_n : max_id + 1;
  if (max_id >= n) {
    throw ParseError(source, 0,
                     "node id " + std::to_string(max_id) +
                         " exceeds header count n=" + std::to_string(n));
  }
  return Graph::FromEdges(n, edges);
}

Graph LoadEdgeList(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseEdgeList(ss.str(), path);
}

std::string FormatEdgeList(const Graph& g) {
  std::string out = "n=" + std::to_string(g.num_nodes()) + "\n";
  for (const auto& [u, v] : g.Edges()) {
    out += std::to_string(u);
    out += '\t';
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

void SaveEdgeList(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out << FormatEdgeList(g);
}

}  // namespace ldpembed
