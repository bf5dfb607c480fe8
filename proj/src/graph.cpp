#include "courtcast/graph.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace courtcast::graph {

GraphSnapshot build_snapshot(const std::vector<Game>& games, double minutes_threshold,
                             int day_index) {
    GraphSnapshot snap;
    snap.day_index = day_index;

    std::map<int, int> seen;  // player -> game_id of first appearance
    for (const Game& game : games) {
        std::vector<int> qualifying;
        auto take = [&](const PlayerMinutes& team) {
            for (const auto& [player, minutes] : team) {
                if (minutes < 0.0)
                    throw Error("negative minutes for player " + std::to_string(player));
                auto [it, inserted] = seen.emplace(player, game.game_id);
                if (!inserted) throw DuplicatePlayerError(player, it->second, game.game_id);
                if (minutes >= minutes_threshold) qualifying.push_back(player);
            }
        };
        take(game.team_a);
        take(game.team_b);

        std::sort(qualifying.begin(), qualifying.end());
        for (size_t i = 0; i < qualifying.size(); ++i)
            for (size_t j = i + 1; j < qualifying.size(); ++j)
                snap.edges.emplace_back(qualifying[i], qualifying[j]);
        snap.components.push_back(std::move(qualifying));
    }
    std::sort(snap.edges.begin(), snap.edges.end());
    return snap;
}

Eigen::MatrixXi adjacency(const GraphSnapshot& snapshot, int n) {
    Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);
    for (const auto& [i, j] : snapshot.edges) {
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw Error("edge {" + std::to_string(i) + "," + std::to_string(j) +
                        "} out of range for n=" + std::to_string(n));
        adj(i, j) = 1;
        adj(j, i) = 1;
    }
    return adj;
}

Eigen::MatrixXi laplacian(const Eigen::MatrixXi& adj) {
    const Eigen::VectorXi degrees = adj.rowwise().sum();
    Eigen::MatrixXi lap = -adj;
    lap.diagonal() += degrees;
    return lap;
}

int SpectrumSpec::total() const {
    int sum = 0;
    for (const auto& [value, count] : multiplicity) sum += count;
    return sum;
}

std::vector<double> SpectrumSpec::sorted_eigenvalues() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(total()));
    for (const auto& [value, count] : multiplicity)
        out.insert(out.end(), static_cast<size_t>(count), static_cast<double>(value));
    return out;  // map iteration is already ascending
}

SpectrumSpec analytic_spectrum(const std::vector<int>& component_sizes, int n) {
    int covered = 0;
    for (int k : component_sizes) {
        if (k < 2) throw Error("component size " + std::to_string(k) + " below 2");
        covered += k;
    }
    if (covered > n)
        throw Error("component sizes sum to " + std::to_string(covered) + " but n=" +
                    std::to_string(n));

    SpectrumSpec spec;
    const int zero_multiplicity =
        n - covered + static_cast<int>(component_sizes.size());
    if (zero_multiplicity > 0) spec.multiplicity[0] = zero_multiplicity;
    for (int k : component_sizes) spec.multiplicity[k] += k - 1;
    return spec;
}

std::vector<int> verify_cluster_structure(const Eigen::MatrixXi& adj) {
    const int n = static_cast<int>(adj.rows());
    std::vector<int> component_of(static_cast<size_t>(n), -1);
    std::vector<std::vector<int>> components;

    for (int start = 0; start < n; ++start) {
        if (component_of[static_cast<size_t>(start)] != -1) continue;
        std::vector<int> stack{start};
        std::vector<int> members;
        component_of[static_cast<size_t>(start)] = static_cast<int>(components.size());
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int u = 0; u < n; ++u) {
                if (adj(v, u) != 0 && component_of[static_cast<size_t>(u)] == -1) {
                    component_of[static_cast<size_t>(u)] = static_cast<int>(components.size());
                    stack.push_back(u);
                }
            }
        }
        std::sort(members.begin(), members.end());
        components.push_back(std::move(members));
    }

    std::vector<int> sizes;
    for (const auto& members : components) {
        if (members.size() < 2) continue;
        for (size_t a = 0; a < members.size(); ++a)
            for (size_t b = a + 1; b < members.size(); ++b)
                if (adj(members[a], members[b]) == 0) throw NotCompleteError(members);
        sizes.push_back(static_cast<int>(members.size()));
    }
    std::sort(sizes.begin(), sizes.end(), std::greater<int>());
    return sizes;
}

DirectedEdges directed_edges(const GraphSnapshot& snapshot, int n) {
    DirectedEdges out;
    out.node_count = n;
    std::vector<std::pair<int, int>> pairs;  // (target, source)
    pairs.reserve(snapshot.edges.size() * 2 + static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) pairs.emplace_back(i, i);
    for (const auto& [i, j] : snapshot.edges) {
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw Error("edge {" + std::to_string(i) + "," + std::to_string(j) +
                        "} out of range for n=" + std::to_string(n));
        pairs.emplace_back(i, j);
        pairs.emplace_back(j, i);
    }
    std::sort(pairs.begin(), pairs.end());
    out.source.reserve(pairs.size());
    out.target.reserve(pairs.size());
    for (const auto& [tgt, src] : pairs) {
        out.target.push_back(tgt);
        out.source.push_back(src);
    }
    return out;
}

}  // namespace courtcast::graph
