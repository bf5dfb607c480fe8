#include "courtcast/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace courtcast::ad {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
}

void require_rank(const Tensor& t, int rank, const char* op) {
    if (t.rank() != rank)
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got " + t.shape_string());
}

}  // namespace

int Tape::check(Var v) const {
    if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
        throw Error("Var does not belong to this tape");
    return v.id;
}

Var Tape::push(Tensor value, std::function<void(Tape&, int)> backprop) {
    Node node;
    node.grad = Tensor(value.shape());
    node.value = std::move(value);
    node.backprop = std::move(backprop);
    nodes_.push_back(std::move(node));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Tensor value) { return push(std::move(value), nullptr); }

Var Tape::add(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require_same_shape(va, vb, "add");
    Tensor out(va.shape());
    out.array() = va.array() + vb.array();
    return push(std::move(out), [a, b](Tape& t, int self) {
        t.grad_of(a.id).array() += t.grad_of(self).array();
        t.grad_of(b.id).array() += t.grad_of(self).array();
    });
}

Var Tape::sub(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require_same_shape(va, vb, "sub");
    Tensor out(va.shape());
    out.array() = va.array() - vb.array();
    return push(std::move(out), [a, b](Tape& t, int self) {
        t.grad_of(a.id).array() += t.grad_of(self).array();
        t.grad_of(b.id).array() -= t.grad_of(self).array();
    });
}

Var Tape::mul(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require_same_shape(va, vb, "mul");
    Tensor out(va.shape());
    out.array() = va.array() * vb.array();
    return push(std::move(out), [a, b](Tape& t, int self) {
        t.grad_of(a.id).array() += t.grad_of(self).array() * t.value_of(b.id).array();
        t.grad_of(b.id).array() += t.grad_of(self).array() * t.value_of(a.id).array();
    });
}

Var Tape::scale(Var a, double c) {
    Tensor out(value(a).shape());
    out.array() = value(a).array() * c;
    return push(std::move(out), [a, c](Tape& t, int self) {
        t.grad_of(a.id).array() += c * t.grad_of(self).array();
    });
}

Var Tape::add_row_vector(Var a, Var row) {
    const Tensor& va = value(a);
    const Tensor& vr = value(row);
    require_rank(va, 2, "add_row_vector");
    if (vr.size() != va.dim(1)) throw ShapeError("add_row_vector: row length mismatch");
    Tensor out(va.shape());
    out.matrix() = va.matrix();
    out.matrix().rowwise() += vr.array().matrix().transpose();
    return push(std::move(out), [a, row](Tape& t, int self) {
        const Tensor& g = t.grad_of(self);
        t.grad_of(a.id).array() += g.array();
        t.grad_of(row.id).array().matrix() += g.matrix().colwise().sum().transpose();
    });
}

Var Tape::mul_row_vector(Var a, Var row) {
    const Tensor& va = value(a);
    const Tensor& vr = value(row);
    require_rank(va, 2, "mul_row_vector");
    if (vr.size() != va.dim(1)) throw ShapeError("mul_row_vector: row length mismatch");
    Tensor out(va.shape());
    out.matrix() =
        (va.matrix().array().rowwise() * vr.array().matrix().transpose().array()).matrix();
    return push(std::move(out), [a, row](Tape& t, int self) {
        const Tensor& g = t.grad_of(self);
        t.grad_of(a.id).matrix().array() +=
            g.matrix().array().rowwise() * t.value_of(row.id).array().matrix().transpose().array();
        t.grad_of(row.id).array().matrix() +=
            (g.matrix().array() * t.value_of(a.id).matrix().array()).colwise().sum().matrix().transpose();
    });
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require_rank(va, 2, "matmul");
    require_rank(vb, 2, "matmul");
    if (va.dim(1) != vb.dim(0))
        throw ShapeError("matmul: inner dimensions disagree, " + va.shape_string() + " vs " +
                         vb.shape_string());
    Tensor out({va.dim(0), vb.dim(1)});
    out.matrix() = va.matrix() * vb.matrix();
    return push(std::move(out), [a, b](Tape& t, int self) {
        const Tensor& g = t.grad_of(self);
        t.grad_of(a.id).matrix() += g.matrix() * t.value_of(b.id).matrix().transpose();
        t.grad_of(b.id).matrix() += t.value_of(a.id).matrix().transpose() * g.matrix();
    });
}

Var Tape::relu(Var a) {
    Tensor out(value(a).shape());
    out.array() = value(a).array().max(0.0);
    return push(std::move(out), [a](Tape& t, int self) {
        t.grad_of(a.id).array() +=
            t.grad_of(self).array() * (t.value_of(a.id).array() > 0.0).cast<double>();
    });
}

Var Tape::leaky_relu(Var a, double slope) {
    if (slope <= 0.0 || slope >= 1.0) throw Error("leaky_relu: slope must lie in (0,1)");
    const auto& x = value(a).array();
    Tensor out(value(a).shape());
    out.array() = (x > 0.0).select(x, slope * x);
    return push(std::move(out), [a, slope](Tape& t, int self) {
        const auto& x = t.value_of(a.id).array();
        t.grad_of(a.id).array() +=
            t.grad_of(self).array() * (x > 0.0).select(Eigen::ArrayXd::Ones(x.size()),
                                                       Eigen::ArrayXd::Constant(x.size(), slope));
    });
}

Var Tape::elu(Var a) {
    const auto& x = value(a).array();
    Tensor out(value(a).shape());
    out.array() = (x > 0.0).select(x, x.exp() - 1.0);
    return push(std::move(out), [a](Tape& t, int self) {
        const auto& x = t.value_of(a.id).array();
        const auto& y = t.value_of(self).array();
        // d/dx of exp(x)-1 is exp(x) = y+1 on the negative branch.
        t.grad_of(a.id).array() +=
            t.grad_of(self).array() * (x > 0.0).select(Eigen::ArrayXd::Ones(x.size()), y + 1.0);
    });
}

Var Tape::sum(Var a) {
    Tensor out = Tensor::scalar(value(a).array().sum());
    return push(std::move(out), [a](Tape& t, int self) {
        t.grad_of(a.id).array() += t.grad_of(self).at(0);
    });
}

Var Tape::mean(Var a) {
    const double n = static_cast<double>(value(a).size());
    Tensor out = Tensor::scalar(value(a).array().sum() / n);
    return push(std::move(out), [a, n](Tape& t, int self) {
        t.grad_of(a.id).array() += t.grad_of(self).at(0) / n;
    });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw Error("concat_cols: no inputs");
    const int rows = value(parts[0]).dim(0);
    int cols = 0;
    for (Var p : parts) {
        require_rank(value(p), 2, "concat_cols");
        if (value(p).dim(0) != rows) throw ShapeError("concat_cols: row count mismatch");
        cols += value(p).dim(1);
    }
    Tensor out({rows, cols});
    int offset = 0;
    for (Var p : parts) {
        const int w = value(p).dim(1);
        out.matrix().middleCols(offset, w) = value(p).matrix();
        offset += w;
    }
    return push(std::move(out), [parts](Tape& t, int self) {
        const Tensor& g = t.grad_of(self);
        int offset = 0;
        for (Var p : parts) {
            const int w = t.value_of(p.id).dim(1);
            t.grad_of(p.id).matrix() += g.matrix().middleCols(offset, w);
            offset += w;
        }
    });
}

Var Tape::gather_rows(Var table, std::vector<int> ids) {
    const Tensor& vt = value(table);
    require_rank(vt, 2, "gather_rows");
    for (int id : ids)
        if (id < 0 || id >= vt.dim(0))
            throw Error("gather_rows: id " + std::to_string(id) + " outside table with " +
                        std::to_string(vt.dim(0)) + " rows");
    Tensor out({static_cast<int>(ids.size()), vt.dim(1)});
    for (size_t r = 0; r < ids.size(); ++r)
        out.matrix().row(static_cast<Eigen::Index>(r)) = vt.matrix().row(ids[r]);
    return push(std::move(out), [table, ids = std::move(ids)](Tape& t, int self) {
        const Tensor& g = t.grad_of(self);
        for (size_t r = 0; r < ids.size(); ++r)
            t.grad_of(table.id).matrix().row(ids[r]) +=
                g.matrix().row(static_cast<Eigen::Index>(r));
    });
}

Var Tape::segment_softmax(Var scores, std::vector<int> segment_of, int segment_count) {
    const Tensor& vs = value(scores);
    require_rank(vs, 1, "segment_softmax");
    if (static_cast<Eigen::Index>(segment_of.size()) != vs.size())
        throw ShapeError("segment_softmax: one segment id per entry required");

    std::vector<std::vector<int>> entries(static_cast<size_t>(segment_count));
    for (size_t e = 0; e < segment_of.size(); ++e) {
        const int s = segment_of[e];
        if (s < 0 || s >= segment_count)
            throw Error("segment_softmax: segment id " + std::to_string(s) + " out of range");
        entries[static_cast<size_t>(s)].push_back(static_cast<int>(e));
    }
    for (int s = 0; s < segment_count; ++s)
        if (entries[static_cast<size_t>(s)].empty())
            throw Error("segment_softmax: segment " + std::to_string(s) + " is empty");

    Tensor out(vs.shape());
    for (const auto& segment : entries) {
        double peak = -std::numeric_limits<double>::infinity();
        for (int e : segment) peak = std::max(peak, vs.at(e));
        double total = 0.0;
        for (int e : segment) {
            out.at(e) = std::exp(vs.at(e) - peak);
            total += out.at(e);
        }
        for (int e : segment) out.at(e) /= total;
    }
    return push(std::move(out),
                [scores, entries = std::move(entries)](Tape& t, int self) {
                    const Tensor& y = t.value_of(self);
                    const Tensor& g = t.grad_of(self);
                    Tensor& gs = t.grad_of(scores.id);
                    for (const auto& segment : entries) {
                        double weighted = 0.0;
                        for (int e : segment) weighted += y.at(e) * g.at(e);
                        for (int e : segment) gs.at(e) += y.at(e) * (g.at(e) - weighted);
                    }
                });
}

Var Tape::segment_weighted_sum(Var weights, Var values, std::vector<int> segment_of,
                               int segment_count) {
    const Tensor& vw = value(weights);
    const Tensor& vv = value(values);
    require_rank(vw, 1, "segment_weighted_sum");
    require_rank(vv, 2, "segment_weighted_sum");
    if (vw.size() != vv.dim(0) || static_cast<Eigen::Index>(segment_of.size()) != vw.size())
        throw ShapeError("segment_weighted_sum: entry counts disagree");
    for (int s : segment_of)
        if (s < 0 || s >= segment_count)
            throw Error("segment_weighted_sum: segment id out of range");

    Tensor out({segment_count, vv.dim(1)});
    for (Eigen::Index e = 0; e < vw.size(); ++e)
        out.matrix().row(segment_of[static_cast<size_t>(e)]) += vw.at(e) * vv.matrix().row(e);
    return push(std::move(out),
                [weights, values, segment_of = std::move(segment_of)](Tape& t, int self) {
                    const Tensor& g = t.grad_of(self);
                    const Tensor& vw = t.value_of(weights.id);
                    const Tensor& vv = t.value_of(values.id);
                    Tensor& gw = t.grad_of(weights.id);
                    Tensor& gv = t.grad_of(values.id);
                    for (Eigen::Index e = 0; e < vw.size(); ++e) {
                        const int s = segment_of[static_cast<size_t>(e)];
                        gw.at(e) += g.matrix().row(s).dot(vv.matrix().row(e));
                        gv.matrix().row(e) += vw.at(e) * g.matrix().row(s);
                    }
                });
}

Var Tape::conv1d_time(Var input, Var kernel) {
    const Tensor& vin = value(input);
    const Tensor& vk = value(kernel);
    require_rank(vin, 3, "conv1d_time");
    require_rank(vk, 3, "conv1d_time");
    const int n = vin.dim(0), channels = vin.dim(1), t_in = vin.dim(2);
    const int out_channels = vk.dim(0), k = vk.dim(2);
    if (vk.dim(1) != channels) throw ShapeError("conv1d_time: channel counts disagree");
    if (k > t_in)
        throw ShapeError("conv1d_time: kernel width " + std::to_string(k) +
                         " exceeds time length " + std::to_string(t_in));
    const int t_out = t_in - k + 1;

    Tensor out({n, out_channels, t_out});
    for (int i = 0; i < n; ++i)
        for (int o = 0; o < out_channels; ++o)
            for (int t = 0; t < t_out; ++t) {
                double acc = 0.0;
                for (int c = 0; c < channels; ++c)
                    for (int dt = 0; dt < k; ++dt) acc += vin(i, c, t + dt) * vk(o, c, dt);
                out(i, o, t) = acc;
            }
    return push(std::move(out), [input, kernel](Tape& t, int self) {
        const Tensor& g = t.grad_of(self);
        const Tensor& vin = t.value_of(input.id);
        const Tensor& vk = t.value_of(kernel.id);
        Tensor& gin = t.grad_of(input.id);
        Tensor& gk = t.grad_of(kernel.id);
        const int n = vin.dim(0), channels = vin.dim(1);
        const int out_channels = vk.dim(0), k = vk.dim(2);
        const int t_out = g.dim(2);
        for (int i = 0; i < n; ++i)
            for (int o = 0; o < out_channels; ++o)
                for (int tt = 0; tt < t_out; ++tt) {
                    const double go = g(i, o, tt);
                    if (go == 0.0) continue;
                    for (int c = 0; c < channels; ++c)
                        for (int dt = 0; dt < k; ++dt) {
                            gin(i, c, tt + dt) += go * vk(o, c, dt);
                            gk(o, c, dt) += go * vin(i, c, tt + dt);
                        }
                }
    });
}

Var Tape::stack_time(const std::vector<Var>& steps) {
    if (steps.empty()) throw Error("stack_time: no inputs");
    const Tensor& first = value(steps[0]);
    require_rank(first, 2, "stack_time");
    const int n = first.dim(0), h = first.dim(1);
    const int t_len = static_cast<int>(steps.size());
    for (Var s : steps) require_same_shape(value(s), first, "stack_time");

    Tensor out({n, h, t_len});
    for (int tt = 0; tt < t_len; ++tt) {
        const Tensor& step = value(steps[static_cast<size_t>(tt)]);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < h; ++c) out(i, c, tt) = step(i, c);
    }
    return push(std::move(out), [steps](Tape& t, int self) {
        const Tensor& g = t.grad_of(self);
        const int n = g.dim(0), h = g.dim(1), t_len = g.dim(2);
        for (int tt = 0; tt < t_len; ++tt) {
            Tensor& gs = t.grad_of(steps[static_cast<size_t>(tt)].id);
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < h; ++c) gs(i, c) += g(i, c, tt);
        }
    });
}

Var Tape::reshape(Var a, std::vector<int> shape) {
    Tensor out(shape);
    if (out.size() != value(a).size())
        throw ShapeError("reshape: element count mismatch");
    out.array() = value(a).array();
    return push(std::move(out), [a](Tape& t, int self) {
        t.grad_of(a.id).array() += t.grad_of(self).array();
    });
}

Var Tape::dropout(Var a, double p, bool training, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw Error("dropout: p must lie in [0,1)");
    if (!training || p == 0.0) return a;
    const Tensor& va = value(a);
    Eigen::ArrayXd mask(va.size());
    const double keep_scale = 1.0 / (1.0 - p);
    for (Eigen::Index i = 0; i < va.size(); ++i)
        mask[i] = rng.uniform() < p ? 0.0 : keep_scale;
    Tensor out(va.shape());
    out.array() = va.array() * mask;
    return push(std::move(out), [a, mask = std::move(mask)](Tape& t, int self) {
        t.grad_of(a.id).array() += t.grad_of(self).array() * mask;
    });
}

Var Tape::mse(Var pred, const Tensor& target) {
    const Tensor& vp = value(pred);
    require_same_shape(vp, target, "mse");
    const double n = static_cast<double>(vp.size());
    const Eigen::ArrayXd diff = vp.array() - target.array();
    Tensor out = Tensor::scalar(diff.square().sum() / n);
    return push(std::move(out), [pred, diff, n](Tape& t, int self) {
        t.grad_of(pred.id).array() += t.grad_of(self).at(0) * 2.0 / n * diff;
    });
}

Var Tape::masked_mse(Var pred, const Tensor& target,
                     const std::vector<std::uint8_t>& row_mask) {
    const Tensor& vp = value(pred);
    require_rank(vp, 2, "masked_mse");
    require_same_shape(vp, target, "masked_mse");
    if (static_cast<int>(row_mask.size()) != vp.dim(0))
        throw ShapeError("masked_mse: one mask entry per row required");

    long active = 0;
    for (std::uint8_t m : row_mask) active += m ? 1 : 0;
    if (active == 0) throw Error("masked_mse: mask selects no rows");
    const double count = static_cast<double>(active) * vp.dim(1);

    double acc = 0.0;
    for (int i = 0; i < vp.dim(0); ++i) {
        if (!row_mask[static_cast<size_t>(i)]) continue;
        for (int j = 0; j < vp.dim(1); ++j) {
            const double d = vp(i, j) - target(i, j);
            acc += d * d;
        }
    }
    Tensor out = Tensor::scalar(acc / count);
    return push(std::move(out), [pred, target, row_mask, count](Tape& t, int self) {
        const double seed = t.grad_of(self).at(0) * 2.0 / count;
        const Tensor& vp = t.value_of(pred.id);
        Tensor& gp = t.grad_of(pred.id);
        for (int i = 0; i < vp.dim(0); ++i) {
            if (!row_mask[static_cast<size_t>(i)]) continue;
            for (int j = 0; j < vp.dim(1); ++j)
                gp(i, j) += seed * (vp(i, j) - target(i, j));
        }
    });
}

void Tape::backward(Var loss) {
    const int loss_id = check(loss);
    if (nodes_[static_cast<size_t>(loss_id)].value.size() != 1)
        throw ShapeError("backward: loss must be scalar");
    for (const Node& node : nodes_)
        if (!node.value.all_finite())
            throw Error("backward: non-finite value recorded on tape");
    nodes_[static_cast<size_t>(loss_id)].grad.at(0) = 1.0;
    for (int id = loss_id; id >= 0; --id) {
        const auto& fn = nodes_[static_cast<size_t>(id)].backprop;
        if (fn) fn(*this, id);
    }
}

Var linear(Tape& tape, Var x, Var w, Var b) {
    return tape.add_row_vector(tape.matmul(x, w), b);
}

}  // namespace courtcast::ad
