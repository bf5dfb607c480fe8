#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "courtcast/graph.hpp"
#include "courtcast/optim.hpp"
#include "courtcast/tape.hpp"

namespace courtcast::model {

// gat_tcn is the full forecaster; per_node_tcn swaps the attention layer for
// a shared per-player linear map (no cross-player mixing) as the graph-free
// contrast, keeping the temporal head identical.
enum class Arch { gat_tcn, per_node_tcn };

std::string arch_name(Arch arch);
Arch arch_from_name(const std::string& name);

struct ModelConfig {
    int in_features = 13;
    int team_emb_dim = 2;
    int pos_emb_dim = 2;
    int gat_out = 32;  // width after concatenating all heads
    int heads = 4;
    double leaky_slope = 0.2;
    int window = 10;  // input days per sample
    int tcn_out = 64;
    int tcn_kernel = 3;
    int out_features = 6;
    double dropout = 0.0;
    int team_count = 30;
    int position_count = 5;

    int context_dim() const { return in_features + team_emb_dim + pos_emb_dim; }
    int head_dim() const { return gat_out / heads; }
    int conv_steps() const { return window - tcn_kernel + 1; }
    int flat_dim() const { return tcn_out * conv_steps(); }

    void validate() const;
};

// Every learnable array, owned with its Adam state. Construction order (and
// therefore init-RNG consumption order) is fixed so a seed pins all values.
struct ModelParams {
    Arch arch = Arch::gat_tcn;
    std::vector<ad::Parameter> params;

    ad::Parameter& find(const std::string& name);
    const ad::Parameter& find(const std::string& name) const;
    void zero_grads();
};

ModelParams init_params(const ModelConfig& config, Arch arch, std::uint64_t seed);

// Leaves every parameter onto a tape so one training step can read values and
// collect gradients by name.
struct BoundParams {
    std::vector<std::pair<std::string, ad::Var>> vars;
    ad::Var at(const std::string& name) const;
};

BoundParams bind(ad::Tape& tape, const ModelParams& params);

// Adds each tape gradient into the matching parameter's grad buffer.
void accumulate_grads(const ad::Tape& tape, const BoundParams& bound, ModelParams& params);

// g_i = [features_i || team_emb || pos_emb] -> [n x (13+2+2)].
ad::Var concat_context(ad::Tape& tape, ad::Var features, const std::vector<int>& team_ids,
                       const std::vector<int>& pos_ids, const BoundParams& bound,
                       const ModelConfig& config);

// Attention logits for one head over a directed edge list:
// e(i<-j) = a . leaky_relu(W_l g_i + W_r g_j).
ad::Var gatv2_scores(ad::Tape& tape, ad::Var g, const graph::DirectedEdges& edges,
                     const BoundParams& bound, int head, const ModelConfig& config);

// Original GAT scoring, kept for the static-attention contrast:
// e(i<-j) = leaky_relu(a . (W_l g_i + W_r g_j)).
ad::Var gat_v1_scores(ad::Tape& tape, ad::Var g, const graph::DirectedEdges& edges,
                      const BoundParams& bound, int head, const ModelConfig& config);

// Full multi-head layer: per head, softmax the scores over each node's
// in-neighborhood (self-loop included), aggregate W_r g_j, apply ELU;
// heads concatenate to width gat_out. Dropout (when active) is applied to the
// attention weights.
ad::Var gatv2_layer(ad::Tape& tape, ad::Var g, const graph::DirectedEdges& edges,
                    const BoundParams& bound, const ModelConfig& config, bool training,
                    Rng& rng);

// Graph-free stand-in: elu(g W) with a single shared weight matrix.
ad::Var per_node_layer(ad::Tape& tape, ad::Var g, const BoundParams& bound);

// Temporal head: conv over time on relu(H), flatten, linear to out_features.
ad::Var tcn_head(ad::Tape& tape, ad::Var h_seq, const BoundParams& bound,
                 const ModelConfig& config);

// One window (config.window days) of features and edges -> [n x out_features].
ad::Var forward_window(ad::Tape& tape, const std::vector<Tensor>& day_features,
                       const std::vector<const graph::DirectedEdges*>& day_edges,
                       const std::vector<int>& team_ids, const std::vector<int>& pos_ids,
                       const BoundParams& bound, const ModelConfig& config, Arch arch,
                       bool training, Rng& rng);

// Forward-only n x n matrix of max-over-heads attention for one day; zero
// where there is no directed edge. Row i holds the attention node i pays to
// each in-neighbor, self-loop on the diagonal (exports drop the diagonal).
Eigen::MatrixXd attention_matrix(const Tensor& day_features,
                                 const graph::DirectedEdges& edges,
                                 const std::vector<int>& team_ids,
                                 const std::vector<int>& pos_ids, const ModelParams& params,
                                 const ModelConfig& config);

}  // namespace courtcast::model
