#pragma once

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

namespace tot::net {

/// Dense row-major f64 matrix. Column vectors are r x 1.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return a.size(); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    bool operator==(const Matrix&) const = default;
};

/// Dynamically built computation graph with reverse-mode differentiation.
///
/// Usage: build the forward pass with the op methods (ids reference earlier
/// nodes, so creation order is a topological order), then call backward() on
/// a 1x1 node. Gradients of param leaves accumulate into the Matrix* the leaf
/// was bound to. One graph per forward pass; graphs are cheap to build.
class Graph {
public:
    using Id = int;

    Id constant(Matrix m);
    // Leaf whose gradient accumulates into *grad on backward(); the value is
    // copied at creation. grad may be null for a frozen leaf.
    Id param(const Matrix& value, Matrix* grad);

    Id matmul(Id a, Id b);
    Id add(Id a, Id b);          // same shape
    Id add_colvec(Id a, Id v);   // v is rows x 1, broadcast across columns of a
    Id relu(Id a);
    Id scale(Id a, double s);
    Id transpose(Id a);
    Id softmax_rows(Id a);       // softmax along each row (max-subtracted)
    Id mean_cols(Id a);          // average of columns -> rows x 1
    Id log_softmax_col(Id a);    // a is m x 1 -> m x 1 log-probabilities
    Id pick(Id a, int r, int c); // 1 x 1 view of one entry
    Id hcat(const std::vector<Id>& cols);  // concat column vectors -> rows x n

    const Matrix& value(Id id) const { return nodes_[static_cast<std::size_t>(id)].val; }
    void backward(Id root);      // root must be 1 x 1

private:
    enum class Op {
        Const,
        Param,
        MatMul,
        Add,
        AddColVec,
        Relu,
        Scale,
        Transpose,
        SoftmaxRows,
        MeanCols,
        LogSoftmaxCol,
        Pick,
        HCat,
    };

    struct Node {
        Op op;
        std::vector<Id> src;
        Matrix val;
        Matrix grad;          // allocated during backward
        double scalar = 0.0;  // Scale
        int pr = 0, pc = 0;   // Pick
        Matrix* bound_grad = nullptr;
    };

    Id push(Node n);
    std::vector<Node> nodes_;
};

}  // namespace tot::net
