#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "courtcast/rng.hpp"
#include "courtcast/tensor.hpp"

namespace courtcast::ad {

// Handle to a node on a Tape. Only valid for the tape that produced it.
struct Var {
    int id = -1;
};

// Reverse-mode tape. Every op records one node holding the forward value, a
// zero-initialized gradient buffer, and a closure that pushes the node's
// gradient into its parents. backward() replays the list in exact reverse
// recording order; fan-out accumulates additively because each consumer adds
// into the shared parent gradient. Recording is single-threaded by contract.
class Tape {
public:
    Var leaf(Tensor value);

    const Tensor& value(Var v) const { return nodes_[check(v)].value; }
    const Tensor& grad(Var v) const { return nodes_[check(v)].grad; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    void clear() { nodes_.clear(); }

    // Elementwise arithmetic (same shape).
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double c);

    // Row broadcasts: a is [m x n], row is [n].
    Var add_row_vector(Var a, Var row);
    Var mul_row_vector(Var a, Var row);

    // [m x k] * [k x r] -> [m x r]
    Var matmul(Var a, Var b);

    Var relu(Var a);
    Var leaky_relu(Var a, double slope);
    Var elu(Var a);

    Var sum(Var a);   // -> scalar [1]
    Var mean(Var a);  // -> scalar [1]

    // Concatenate rank-2 tensors with equal row counts along columns.
    Var concat_cols(const std::vector<Var>& parts);

    // Row gather; the backward pass scatter-adds gradients into the looked-up
    // rows. Also serves as embedding lookup.
    Var gather_rows(Var table, std::vector<int> ids);

    // Softmax over each segment of a rank-1 score vector, with per-segment
    // max subtraction so large scores cannot overflow. Every segment id in
    // [0, segment_count) must be referenced by at least one entry.
    Var segment_softmax(Var scores, std::vector<int> segment_of, int segment_count);

    // out[s] = sum over entries e with segment_of[e] == s of weights[e] * values[e].
    // weights is [E], values is [E x d], result is [segment_count x d].
    Var segment_weighted_sum(Var weights, Var values, std::vector<int> segment_of,
                             int segment_count);

    // Valid cross-correlation along the trailing (time) axis, summed over
    // channels: input [n x c x t], kernel [o x c x k] -> [n x o x (t-k+1)].
    Var conv1d_time(Var input, Var kernel);

    // T rank-2 steps of shape [n x h] -> [n x h x T].
    Var stack_time(const std::vector<Var>& steps);

    // Same element count, row-major order preserved.
    Var reshape(Var a, std::vector<int> shape);

    // Inverted dropout: kept entries are scaled by 1/(1-p). Identity (the
    // input Var itself) when training is false or p == 0.
    Var dropout(Var a, double p, bool training, Rng& rng);

    // Mean squared error against a constant target, over all entries.
    Var mse(Var pred, const Tensor& target);

    // Mean squared error over the rows selected by row_mask (entries of the
    // other rows contribute nothing). Throws when no row is selected.
    Var masked_mse(Var pred, const Tensor& target, const std::vector<std::uint8_t>& row_mask);

    // Seeds d(loss) = 1 and sweeps the tape in reverse. loss must be scalar
    // and every recorded value must be finite.
    void backward(Var loss);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&, int)> backprop;  // (tape, own id)
    };

    int check(Var v) const;
    Var push(Tensor value, std::function<void(Tape&, int)> backprop);
    Tensor& grad_of(int id) { return nodes_[static_cast<size_t>(id)].grad; }
    const Tensor& value_of(int id) const { return nodes_[static_cast<size_t>(id)].value; }

    std::vector<Node> nodes_;
};

// x * W + b with x [m x in], W [in x out], b [out].
Var linear(Tape& tape, Var x, Var w, Var b);

// Embedding lookup: row ids into a [V x d] table.
inline Var embedding_lookup(Tape& tape, Var table, std::vector<int> ids) {
    return tape.gather_rows(table, std::move(ids));
}

}  // namespace courtcast::ad
