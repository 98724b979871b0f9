// Copyright 2026 The FastGCL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "graph.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>

#include "common.hpp"

namespace fastgcl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Non-empty lines of a text file, CR stripped.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) lines.emplace_back(t);
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void parse_error(const std::filesystem::path& file, std::size_t line, std::string_view field,
                              const char* what) {
  fail(ErrorCode::kIo, fmt::format("{}:{}: {} '{}'", file.filename().string(), line, what, field));
}

long long parse_int(std::string_view s, const std::filesystem::path& file, std::size_t line) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) parse_error(file, line, s, "non-integer field");
  return v;
}

double parse_real(std::string_view s, const std::filesystem::path& file, std::size_t line) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    parse_error(file, line, s, "non-numeric field");
  return v;
}

}  // namespace

Graph Graph::from_edges(std::size_t num_nodes, const EdgeList& edges, Matrix features,
                        std::vector<int> labels, std::vector<std::size_t> graph_ids) {
  require(features.rows() == num_nodes,
          fmt::format("features have {} rows but the graph has {} nodes", features.rows(), num_nodes));
  Graph g;
  g.num_nodes_ = num_nodes;
  std::vector<std::vector<std::size_t>> adj(num_nodes);
  for (const auto& [u, v] : edges) {
    require(u < num_nodes && v < num_nodes,
            fmt::format("edge ({},{}) out of range for {} nodes", u, v, num_nodes));
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  g.row_ptr_.assign(num_nodes + 1, 0);
  for (std::size_t v = 0; v < num_nodes; ++v) {
    auto& nb = adj[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    g.row_ptr_[v + 1] = g.row_ptr_[v] + nb.size();
  }
  g.col_idx_.reserve(g.row_ptr_.back());
  for (const auto& nb : adj) g.col_idx_.insert(g.col_idx_.end(), nb.begin(), nb.end());
  g.features_ = std::move(features);
  g.graph_ids_ = std::move(graph_ids);
  g.labels_ = std::move(labels);
  g.validate();
  return g;
}

std::size_t Graph::num_graphs() const {
  if (graph_ids_.empty()) return 1;
  return *std::max_element(graph_ids_.begin(), graph_ids_.end()) + 1;
}

std::vector<std::size_t> Graph::entry_rows() const {
  std::vector<std::size_t> rows(col_idx_.size());
  for (std::size_t v = 0; v < num_nodes_; ++v)
    for (std::size_t e = row_ptr_[v]; e < row_ptr_[v + 1]; ++e) rows[e] = v;
  return rows;
}

std::vector<std::size_t> Graph::mirror_entries() const {
  std::vector<std::size_t> mirror(col_idx_.size());
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    for (std::size_t e = row_ptr_[v]; e < row_ptr_[v + 1]; ++e) {
      const std::size_t u = col_idx_[e];
      const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[u]);
      const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[u + 1]);
      const auto it = std::lower_bound(first, last, v);
      mirror[e] = static_cast<std::size_t>(it - col_idx_.begin());
    }
  }
  return mirror;
}

void Graph::validate() const {
  require(row_ptr_.size() == num_nodes_ + 1 && row_ptr_.front() == 0, "bad row_ptr length");
  require(row_ptr_.back() == col_idx_.size(), "row_ptr[N] must equal the directed entry count");
  require(features_.rows() == num_nodes_, "feature rows must equal node count");
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    require(row_ptr_[v] <= row_ptr_[v + 1], "row_ptr must be nondecreasing");
    for (std::size_t e = row_ptr_[v]; e < row_ptr_[v + 1]; ++e) {
      const std::size_t u = col_idx_[e];
      require(u < num_nodes_, "column index out of range");
      require(u != v, "self-loop stored in graph");
      require(e == row_ptr_[v] || col_idx_[e - 1] < u, "row not strictly sorted (duplicate edge)");
      const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[u]);
      const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[u + 1]);
      require(std::binary_search(first, last, v), "adjacency is not symmetric");
    }
  }
  if (!graph_ids_.empty()) {
    require(graph_ids_.size() == num_nodes_, "graph_ids length must equal node count");
    for (std::size_t v = 0; v < num_nodes_; ++v)
      for (auto u : neighbors(v))
        require(graph_ids_[u] == graph_ids_[v], "edge crosses a graph boundary");
  }
  if (!labels_.empty()) {
    const bool node_level = labels_.size() == num_nodes_;
    const bool graph_level = !graph_ids_.empty() && labels_.size() == num_graphs();
    require(node_level || graph_level, "labels length must equal node or graph count");
  }
}

Matrix Adjacency::to_dense(std::span<const double> edge_weights) const {
  Matrix d(num_nodes, num_nodes);
  for (std::size_t v = 0; v < num_nodes; ++v) {
    for (std::size_t e = row_ptr[v]; e < row_ptr[v + 1]; ++e) {
      double w = 1.0;
      if (!edge_weights.empty() && edge_slot[e] >= 0) w = edge_weights[static_cast<std::size_t>(edge_slot[e])];
      d(v, col_idx[e]) += coeff[e] * w;
    }
  }
  return d;
}

Adjacency normalize(const Graph& g) {
  const std::size_t n = g.num_nodes();
  Adjacency a;
  a.num_nodes = n;
  a.num_edge_slots = g.num_directed_edges();
  a.row_ptr.assign(n + 1, 0);
  a.col_idx.reserve(g.num_directed_edges() + n);
  a.coeff.reserve(g.num_directed_edges() + n);
  a.edge_slot.reserve(g.num_directed_edges() + n);

  std::vector<double> inv_sqrt(n);
  for (std::size_t v = 0; v < n; ++v)
    inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));

  const auto& rp = g.row_ptr();
  const auto& ci = g.col_idx();
  for (std::size_t v = 0; v < n; ++v) {
    bool self_done = false;
    auto push_self = [&] {
      a.col_idx.push_back(v);
      a.coeff.push_back(inv_sqrt[v] * inv_sqrt[v]);
      a.edge_slot.push_back(-1);
      self_done = true;
    };
    for (std::size_t e = rp[v]; e < rp[v + 1]; ++e) {
      const std::size_t u = ci[e];
      if (!self_done && v < u) push_self();
      a.col_idx.push_back(u);
      // min/max ordering makes coeff(u,v) and coeff(v,u) bitwise equal.
      a.coeff.push_back(inv_sqrt[std::min(u, v)] * inv_sqrt[std::max(u, v)]);
      a.edge_slot.push_back(static_cast<std::ptrdiff_t>(e));
    }
    if (!self_done) push_self();
    a.row_ptr[v + 1] = a.col_idx.size();
  }
  return a;
}

Adjacency identity_view(const Graph& g) {
  const std::size_t n = g.num_nodes();
  Adjacency a;
  a.num_nodes = n;
  a.num_edge_slots = 0;
  a.row_ptr.resize(n + 1);
  a.col_idx.resize(n);
  a.coeff.assign(n, 1.0);
  a.edge_slot.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    a.row_ptr[v + 1] = v + 1;
    a.col_idx[v] = v;
  }
  return a;
}

Adjacency neighbor_sum_view(const Adjacency& adj) {
  Adjacency a;
  a.num_nodes = adj.num_nodes;
  a.num_edge_slots = adj.num_edge_slots;
  a.row_ptr.assign(adj.num_nodes + 1, 0);
  for (std::size_t v = 0; v < adj.num_nodes; ++v) {
    for (std::size_t e = adj.row_ptr[v]; e < adj.row_ptr[v + 1]; ++e) {
      if (adj.edge_slot[e] < 0) continue;
      a.col_idx.push_back(adj.col_idx[e]);
      a.coeff.push_back(1.0);
      a.edge_slot.push_back(adj.edge_slot[e]);
    }
    a.row_ptr[v + 1] = a.col_idx.size();
  }
  return a;
}

Graph batch_graphs(std::span<const Graph> graphs) {
  require(!graphs.empty(), "batch_graphs: empty graph list");
  const std::size_t f = graphs.front().feature_dim();
  std::size_t total = 0;
  bool node_labels = true;
  for (const auto& g : graphs) {
    require(g.feature_dim() == f, "batch_graphs: feature dimension mismatch");
    total += g.num_nodes();
    node_labels = node_labels && g.labels().size() == g.num_nodes() && g.num_nodes() > 0;
  }
  EdgeList edges;
  Matrix features(total, f);
  std::vector<std::size_t> ids(total);
  std::vector<int> labels;
  std::size_t offset = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = graphs[gi];
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      ids[offset + v] = gi;
      for (auto u : g.neighbors(v))
        if (v < u) edges.emplace_back(offset + v, offset + u);
      std::copy(g.features().row(v).begin(), g.features().row(v).end(), features.row(offset + v).begin());
    }
    if (node_labels) labels.insert(labels.end(), g.labels().begin(), g.labels().end());
    offset += g.num_nodes();
  }
  return Graph::from_edges(total, edges, std::move(features), std::move(labels), std::move(ids));
}

std::vector<Graph> unbatch(const Graph& batch) {
  require(batch.has_graph_ids(), "unbatch: graph has no graph_ids");
  const std::size_t num_graphs = batch.num_graphs();
  std::vector<std::vector<std::size_t>> members(num_graphs);
  for (std::size_t v = 0; v < batch.num_nodes(); ++v) members[batch.graph_ids()[v]].push_back(v);
  std::vector<std::size_t> local(batch.num_nodes());
  std::vector<Graph> out;
  out.reserve(num_graphs);
  const bool node_labels = batch.labels().size() == batch.num_nodes();
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    const auto& m = members[gi];
    for (std::size_t i = 0; i < m.size(); ++i) local[m[i]] = i;
    Matrix x(m.size(), batch.feature_dim());
    EdgeList edges;
    std::vector<int> labels;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto src = batch.features().row(m[i]);
      std::copy(src.begin(), src.end(), x.row(i).begin());
      for (auto u : batch.neighbors(m[i]))
        if (m[i] < u) edges.emplace_back(i, local[u]);
      if (node_labels) labels.push_back(batch.labels()[m[i]]);
    }
    out.push_back(Graph::from_edges(m.size(), edges, std::move(x), std::move(labels)));
  }
  return out;
}

Graph load_graph(const std::filesystem::path& dir) {
  const auto edges_path = dir / "edges.csv";
  const auto features_path = dir / "features.csv";
  if (!std::filesystem::exists(edges_path)) fail(ErrorCode::kIo, "missing file " + edges_path.string());
  if (!std::filesystem::exists(features_path)) fail(ErrorCode::kIo, "missing file " + features_path.string());

  const auto feature_lines = read_lines(features_path);
  const std::size_t n = feature_lines.size();
  std::size_t f = 0;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    const auto fields = split_fields(feature_lines[i]);
    if (i == 0) f = fields.size();
    if (fields.size() != f)
      fail(ErrorCode::kIo, fmt::format("features.csv:{}: expected {} columns, found {}", i + 1, f, fields.size()));
    for (auto fld : fields) values.push_back(parse_real(fld, features_path, i + 1));
  }
  Matrix features(n, f, std::move(values));

  EdgeList edges;
  const auto edge_lines = read_lines(edges_path);
  std::size_t max_id = 0;
  for (std::size_t i = 0; i < edge_lines.size(); ++i) {
    const auto fields = split_fields(edge_lines[i]);
    if (fields.size() != 2)
      fail(ErrorCode::kIo, fmt::format("edges.csv:{}: expected 'u,v'", i + 1));
    const long long u = parse_int(fields[0], edges_path, i + 1);
    const long long v = parse_int(fields[1], edges_path, i + 1);
    if (u < 0 || v < 0)
      fail(ErrorCode::kIo, fmt::format("edges.csv:{}: node id out of range ({},{})", i + 1, u, v));
    max_id = std::max({max_id, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
  }
  if (!edges.empty() && max_id + 1 > n)
    fail(ErrorCode::kIo,
         fmt::format("features.csv has {} rows but edges.csv references node {}", n, max_id));

  std::vector<std::size_t> graph_ids;
  if (const auto p = dir / "graph_ids.csv"; std::filesystem::exists(p)) {
    const auto lines = read_lines(p);
    if (lines.size() != n)
      fail(ErrorCode::kIo, fmt::format("graph_ids.csv has {} rows, expected {}", lines.size(), n));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const long long id = parse_int(lines[i], p, i + 1);
      if (id < 0) parse_error(p, i + 1, lines[i], "negative graph id");
      graph_ids.push_back(static_cast<std::size_t>(id));
    }
  }
  std::vector<int> labels;
  if (const auto p = dir / "labels.csv"; std::filesystem::exists(p)) {
    const auto lines = read_lines(p);
    for (std::size_t i = 0; i < lines.size(); ++i)
      labels.push_back(static_cast<int>(parse_int(lines[i], p, i + 1)));
  }
  try {
    return Graph::from_edges(n, edges, std::move(features), std::move(labels), std::move(graph_ids));
  } catch (const Error& e) {
    fail(ErrorCode::kIo, dir.string() + ": " + e.what());
  }
}

void save_graph(const Graph& g, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("edges.csv");
    for (std::size_t v = 0; v < g.num_nodes(); ++v)
      for (auto u : g.neighbors(v))
        if (v < u) out << v << ',' << u << '\n';
  }
  {
    auto out = open("features.csv");
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      const auto r = g.features().row(v);
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << fmt::format("{}", r[j]);
      out << '\n';
    }
  }
  if (g.has_labels()) {
    auto out = open("labels.csv");
    for (int l : g.labels()) out << l << '\n';
  }
  if (g.has_graph_ids()) {
    auto out = open("graph_ids.csv");
    for (auto id : g.graph_ids()) out << id << '\n';
  }
}

}  // namespace fastgcl
