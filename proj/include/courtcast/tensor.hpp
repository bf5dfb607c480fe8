#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "courtcast/error.hpp"

namespace courtcast {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrixXd>;
using ConstMatrixMap = Eigen::Map<const RowMatrixXd>;

// Dense value: a shape plus row-major 64-bit storage. Rank 1..3 covers
// everything the forecaster needs; Eigen maps give matrix views over the
// flat buffer.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape)
        : shape_(std::move(shape)), data_(Eigen::ArrayXd::Zero(count(shape_))) {}

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

    static Tensor full(std::vector<int> shape, double value) {
        Tensor t(std::move(shape));
        t.data_.setConstant(value);
        return t;
    }

    static Tensor scalar(double value) { return full({1}, value); }

    static Tensor of(std::vector<int> shape, std::vector<double> values) {
        Tensor t(std::move(shape));
        if (static_cast<Eigen::Index>(values.size()) != t.size())
            throw ShapeError("value count does not match shape");
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data_[i] = values[static_cast<size_t>(i)];
        return t;
    }

    static Tensor from_matrix(const Eigen::MatrixXd& m) {
        Tensor t({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
        t.matrix() = m;
        return t;
    }

    static Tensor from_vector(const Eigen::VectorXd& v) {
        Tensor t({static_cast<int>(v.size())});
        t.data_ = v.array();
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int axis) const { return shape_[static_cast<size_t>(axis)]; }
    Eigen::Index size() const { return data_.size(); }
    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    double& at(Eigen::Index flat) { return data_[flat]; }
    double at(Eigen::Index flat) const { return data_[flat]; }

    double& operator()(int i) { return data_[i]; }
    double operator()(int i) const { return data_[i]; }
    double& operator()(int i, int j) { return data_[static_cast<Eigen::Index>(i) * dim(1) + j]; }
    double operator()(int i, int j) const {
        return data_[static_cast<Eigen::Index>(i) * dim(1) + j];
    }
    double& operator()(int i, int j, int k) {
        return data_[(static_cast<Eigen::Index>(i) * dim(1) + j) * dim(2) + k];
    }
    double operator()(int i, int j, int k) const {
        return data_[(static_cast<Eigen::Index>(i) * dim(1) + j) * dim(2) + k];
    }

    Eigen::ArrayXd& array() { return data_; }
    const Eigen::ArrayXd& array() const { return data_; }

    // Rank-2 view onto the flat buffer.
    MatrixMap matrix() {
        require_rank(2);
        return MatrixMap(data_.data(), dim(0), dim(1));
    }
    ConstMatrixMap matrix() const {
        require_rank(2);
        return ConstMatrixMap(data_.data(), dim(0), dim(1));
    }

    bool all_finite() const { return data_.isFinite().all(); }

    std::string shape_string() const {
        std::string s = "[";
        for (size_t i = 0; i < shape_.size(); ++i) {
            if (i) s += "x";
            s += std::to_string(shape_[i]);
        }
        return s + "]";
    }

private:
    static Eigen::Index count(const std::vector<int>& shape) {
        Eigen::Index n = 1;
        for (int d : shape) {
            if (d < 0) throw ShapeError("negative dimension");
            n *= d;
        }
        return n;
    }

    void require_rank(int r) const {
        if (rank() != r)
            throw ShapeError("expected rank " + std::to_string(r) + " tensor, got " +
                             shape_string());
    }

    std::vector<int> shape_;
    Eigen::ArrayXd data_;
};

}  // namespace courtcast
