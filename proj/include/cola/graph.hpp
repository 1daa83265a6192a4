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

#ifndef COLA_GRAPH_HPP_
#define COLA_GRAPH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cola {

enum class TopologyKind { kLine, kStar, kComplete, kRandom };

TopologyKind parse_topology_kind(const std::string& name);
std::string to_string(TopologyKind kind);

struct Arc {
  int source;
  int destination;
  bool operator==(const Arc&) const = default;
  auto operator<=>(const Arc&) const = default;
};

// Bidirectionally connected network. Nodes are 0-based. Arcs are kept in
// lexicographic (source, destination) order, which fixes the row layout of
// every incidence matrix built from the network.
class Network {
 public:
  // Validates bidirectionality, absence of self-loops/duplicates and
  // connectivity; throws cola::Error otherwise.
  Network(int node_count, std::vector<Arc> arcs);

  // Convenience: each undirected edge {i, j} yields arcs (i,j) and (j,i).
  static Network from_edges(int node_count,
                            const std::vector<std::pair<int, int>>& edges);

  int node_count() const { return node_count_; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }

  bool operator==(const Network& other) const {
    return node_count_ == other.node_count_ && arcs_ == other.arcs_;
  }

 private:
  int node_count_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> neighbors_;
};

bool is_connected(int node_count, const std::vector<Arc>& arcs);

// Number of undirected edges a random topology with `edge_fraction` selects.
std::int64_t random_edge_count(int n, double edge_fraction);

// Random topologies are redrawn until connected, at most this many times.
inline constexpr int kMaxTopologyAttempts = 10000;

Network build_topology(TopologyKind kind, int n,
                       std::optional<double> edge_fraction,
                       std::uint64_t seed);

// Block incidence constructs of a network for variable dimension p. All
// matrices are dense; blocks are explicit p x p identities.
struct IncidenceSet {
  int p = 1;
  Eigen::MatrixXd source;       // A_s, (m p) x (n p)
  Eigen::MatrixXd destination;  // A_d
  Eigen::MatrixXd oriented;     // G_o = A_s - A_d
  Eigen::MatrixXd unoriented;   // G_u = A_s + A_d
  Eigen::MatrixXd laplacian_oriented;    // L_o = G_o^T G_o / 2
  Eigen::MatrixXd laplacian_unoriented;  // L_u = G_u^T G_u / 2
  Eigen::MatrixXd degree;                // D = (L_o + L_u) / 2
};

IncidenceSet incidence_set(const Network& net, int p);

struct SpectralInfo {
  double lambda_min_Lu = 0.0;
  double lambda_max_Lo = 0.0;
  double sigma_max_Gu = 0.0;
  double sigma_max_Go = 0.0;
  double sigma_min_nz_Go = 0.0;
  double kappa_G = 0.0;
};

// Relative cutoff below which a singular value of G_o counts as zero.
inline constexpr double kSingularCutoff = 1e-9;

SpectralInfo spectral_info(const IncidenceSet& inc);

// Arc list as CSV: a "nodes,<n>" line, a "source,destination" header, then
// one 0-based arc per row.
void write_network(const Network& net, const std::string& path);
Network read_network(const std::string& path);

// Writes a matrix as CSV with full round-trip precision.
void write_matrix_csv(const Eigen::MatrixXd& mat, const std::string& path);

}  // namespace cola

#endif  // COLA_GRAPH_HPP_
