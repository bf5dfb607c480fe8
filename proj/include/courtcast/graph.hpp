#pragma once

#include <Eigen/Dense>

#include <map>
#include <utility>
#include <vector>

#include "courtcast/error.hpp"

namespace courtcast::graph {

// One team's participants on a game day: (player index, minutes played).
using PlayerMinutes = std::vector<std::pair<int, double>>;

struct Game {
    int game_id = 0;
    PlayerMinutes team_a;
    PlayerMinutes team_b;
};

// One game day's player-interaction graph over a fixed league roster.
// Each game contributes a complete subgraph over its qualifying players, so
// the snapshot is a cluster graph: a disjoint union of cliques.
struct GraphSnapshot {
    int day_index = 0;
    std::vector<std::pair<int, int>> edges;     // unordered pairs, first < second, sorted
    std::vector<std::vector<int>> components;   // per-game qualifying players, sorted
};

// Builds the snapshot for one day. A player may appear in at most one game;
// players below the minutes threshold are dropped from their game's clique.
GraphSnapshot build_snapshot(const std::vector<Game>& games, double minutes_threshold = 10.0,
                             int day_index = 0);

// Dense symmetric 0/1 adjacency with zero diagonal.
Eigen::MatrixXi adjacency(const GraphSnapshot& snapshot, int n);

// Combinatorial Laplacian: degree matrix minus adjacency. Integer arithmetic,
// so row sums are exactly zero.
Eigen::MatrixXi laplacian(const Eigen::MatrixXi& adj);

// Closed-form Laplacian spectrum of a cluster graph. Every eigenvalue is an
// integer: 0 for each isolated node and once per clique, and each clique size
// k with multiplicity k-1.
struct SpectrumSpec {
    std::map<int, int> multiplicity;  // eigenvalue -> multiplicity

    int total() const;
    // The full eigenvalue multiset in ascending order, for comparison against
    // a numeric eigensolver.
    std::vector<double> sorted_eigenvalues() const;
};

SpectrumSpec analytic_spectrum(const std::vector<int>& component_sizes, int n);

// Checks that the adjacency is a cluster graph and returns the sizes of its
// non-trivial components (size >= 2). Throws NotCompleteError when a
// connected component is not a clique.
std::vector<int> verify_cluster_structure(const Eigen::MatrixXi& adj);

// Directed edge list in the form the attention layer consumes: both
// directions of every undirected edge plus one self-loop per node, sorted by
// (target, source). Idle players keep their self-loop so their forward-filled
// features still propagate.
struct DirectedEdges {
    std::vector<int> source;
    std::vector<int> target;
    int node_count = 0;

    int edge_count() const { return static_cast<int>(source.size()); }
};

DirectedEdges directed_edges(const GraphSnapshot& snapshot, int n);

}  // namespace courtcast::graph
