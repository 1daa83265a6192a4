/*
 * Copyright 2026 The cola-sim Authors
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

#include "cola/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <set>

#include "cola/error.hpp"
#include "cola/rng.hpp"

namespace cola {

TopologyKind parse_topology_kind(const std::string& name) {
  if (name == "line") return TopologyKind::kLine;
  if (name == "star") return TopologyKind::kStar;
  if (name == "complete") return TopologyKind::kComplete;
  if (name == "random") return TopologyKind::kRandom;
  fail(ErrorCode::kInvalidArgument,
       "unknown topology '" + name + "' (expected line|star|complete|random)");
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kLine: return "line";
    case TopologyKind::kStar: return "star";
    case TopologyKind::kComplete: return "complete";
    case TopologyKind::kRandom: return "random";
  }
  return "?";
}

bool is_connected(int node_count, const std::vector<Arc>& arcs) {
  if (node_count <= 0) return false;
  std::vector<std::vector<int>> adj(node_count);
  for (const Arc& a : arcs) adj[a.source].push_back(a.destination);
  std::vector<char> seen(node_count, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == node_count;
}

Network::Network(int node_count, std::vector<Arc> arcs)
    : node_count_(node_count), arcs_(std::move(arcs)) {
  require(node_count_ >= 1, "network needs at least one node");
  std::sort(arcs_.begin(), arcs_.end());
  for (std::size_t e = 0; e < arcs_.size(); ++e) {
    const Arc& a = arcs_[e];
    require(a.source >= 0 && a.source < node_count_ && a.destination >= 0 &&
                a.destination < node_count_,
            "arc endpoint out of range");
    require(a.source != a.destination, "self-loops are not allowed");
    require(e == 0 || !(arcs_[e - 1] == a), "duplicate arc");
    require(std::binary_search(arcs_.begin(), arcs_.end(),
                               Arc{a.destination, a.source}),
            "arc (" + std::to_string(a.source) + "," +
                std::to_string(a.destination) + ") has no reverse arc");
  }
  require(is_connected(node_count_, arcs_), "network is not connected");
  neighbors_.assign(node_count_, {});
  for (const Arc& a : arcs_) neighbors_[a.source].push_back(a.destination);
}

Network Network::from_edges(int node_count,
                            const std::vector<std::pair<int, int>>& edges) {
  std::vector<Arc> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto [i, j] : edges) {
    arcs.push_back({i, j});
    arcs.push_back({j, i});
  }
  return Network(node_count, std::move(arcs));
}

std::int64_t random_edge_count(int n, double edge_fraction) {
  const double possible = 0.5 * static_cast<double>(n) * (n - 1);
  // Guard against 0.1 * 1225 = 122.50000000000001 style round-up.
  const double want = edge_fraction * possible;
  return static_cast<std::int64_t>(std::ceil(want - 1e-9 * possible));
}

namespace {

std::vector<std::pair<int, int>> sample_edges(int n, std::int64_t count,
                                              Rng& rng) {
  std::vector<std::pair<int, int>> all;
  all.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  const auto total = static_cast<std::int64_t>(all.size());
  for (std::int64_t k = 0; k < count; ++k) {
    const std::int64_t pick = rng.uniform_int(k, total - 1);
    std::swap(all[k], all[pick]);
  }
  all.resize(count);
  return all;
}

}  // namespace

Network build_topology(TopologyKind kind, int n,
                       std::optional<double> edge_fraction,
                       std::uint64_t seed) {
  require(n >= 2, "topology needs n >= 2 nodes");
  if (kind == TopologyKind::kRandom) {
    require(edge_fraction.has_value(),
            "random topology requires an edge fraction");
  } else {
    require(!edge_fraction.has_value(),
            "edge fraction only applies to the random topology");
  }

  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case TopologyKind::kLine:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case TopologyKind::kStar:
      for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case TopologyKind::kComplete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
    case TopologyKind::kRandom: {
      const double fraction = *edge_fraction;
      require(fraction > 0.0 && fraction <= 1.0,
              "edge fraction must be in (0, 1]");
      const std::int64_t count = random_edge_count(n, fraction);
      if (count < n - 1) {
        fail(ErrorCode::kInvalidArgument,
             "edge fraction " + std::to_string(fraction) + " selects " +
                 std::to_string(count) + " edges, but a connected graph on " +
                 std::to_string(n) + " nodes needs at least " +
                 std::to_string(n - 1));
      }
      Rng rng(seed);
      for (int attempt = 0; attempt < kMaxTopologyAttempts; ++attempt) {
        auto candidate = sample_edges(n, count, rng);
        std::vector<Arc> arcs;
        for (auto [i, j] : candidate) {
          arcs.push_back({i, j});
          arcs.push_back({j, i});
        }
        if (is_connected(n, arcs)) return Network(n, std::move(arcs));
      }
      fail(ErrorCode::kInvalidArgument,
           "no connected random topology found after " +
               std::to_string(kMaxTopologyAttempts) + " attempts");
    }
  }
  return Network::from_edges(n, edges);
}

IncidenceSet incidence_set(const Network& net, int p) {
  require(p >= 1, "dimension p must be >= 1");
  const int n = net.node_count();
  const int m = net.arc_count();
  IncidenceSet inc;
  inc.p = p;
  inc.source = Eigen::MatrixXd::Zero(m * p, n * p);
  inc.destination = Eigen::MatrixXd::Zero(m * p, n * p);
  const auto eye = Eigen::MatrixXd::Identity(p, p);
  for (int e = 0; e < m; ++e) {
    const Arc& a = net.arcs()[e];
    inc.source.block(e * p, a.source * p, p, p) = eye;
    inc.destination.block(e * p, a.destination * p, p, p) = eye;
  }
  inc.oriented = inc.source - inc.destination;
  inc.unoriented = inc.source + inc.destination;
  inc.laplacian_oriented = 0.5 * inc.oriented.transpose() * inc.oriented;
  inc.laplacian_unoriented = 0.5 * inc.unoriented.transpose() * inc.unoriented;
  inc.degree = 0.5 * (inc.laplacian_oriented + inc.laplacian_unoriented);
  return inc;
}

SpectralInfo spectral_info(const IncidenceSet& inc) {
  require(inc.oriented.size() > 0, "empty incidence set");
  SpectralInfo info;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lu(inc.laplacian_unoriented,
                                                    Eigen::EigenvaluesOnly);
  // Clamp the rounding noise of a PSD zero eigenvalue.
  info.lambda_min_Lu = std::max(0.0, lu.eigenvalues().minCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lo(inc.laplacian_oriented,
                                                    Eigen::EigenvaluesOnly);
  info.lambda_max_Lo = lo.eigenvalues().maxCoeff();

  Eigen::BDCSVD<Eigen::MatrixXd> go(inc.oriented);
  const auto& sv = go.singularValues();
  info.sigma_max_Go = sv.maxCoeff();
  const double cutoff = kSingularCutoff * info.sigma_max_Go;
  double smallest = 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff && (smallest == 0.0 || sv[k] < smallest))
      smallest = sv[k];
  if (!(info.sigma_max_Go > 0.0) || smallest == 0.0) {
    fail(ErrorCode::kNumerical,
         "G_o has no singular value above the cutoff; graph is empty or "
         "disconnected");
  }
  info.sigma_min_nz_Go = smallest;

  Eigen::BDCSVD<Eigen::MatrixXd> gu(inc.unoriented);
  info.sigma_max_Gu = gu.singularValues().maxCoeff();
  info.kappa_G = info.sigma_max_Gu / info.sigma_min_nz_Go;
  return info;
}

void write_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << "nodes," << net.node_count() << "\nsource,destination\n";
  for (const Arc& a : net.arcs()) out << a.source << ',' << a.destination << '\n';
  if (!out) fail(ErrorCode::kIo, "failed writing " + path);
}

Network read_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  std::string line;
  int n = -1;
  std::vector<Arc> arcs;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == "source,destination") continue;
    int a = 0, b = 0;
    if (std::sscanf(line.c_str(), "nodes,%d", &n) == 1) continue;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%d,%d%c", &a, &b, &tail) != 2)
      fail(ErrorCode::kIo, path + ":" + std::to_string(lineno) +
                               ": malformed arc row '" + line + "'");
    arcs.push_back({a, b});
  }
  if (n < 1) fail(ErrorCode::kIo, path + ": missing 'nodes,<n>' line");
  try {
    return Network(n, std::move(arcs));
  } catch (const Error& e) {
    fail(ErrorCode::kIo, path + ": " + e.what());
  }
}

void write_matrix_csv(const Eigen::MatrixXd& mat, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  char buf[32];
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", mat(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "failed writing " + path);
}

}  // namespace cola
