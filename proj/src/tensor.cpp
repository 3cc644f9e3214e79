#include "tot/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tot::net {

namespace {

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions disagree");
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

Matrix mat_transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
    return t;
}

}  // namespace

Graph::Id Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

Graph::Id Graph::constant(Matrix m) {
    Node n{Op::Const, {}, std::move(m), {}, 0.0, 0, 0, nullptr};
    return push(std::move(n));
}

Graph::Id Graph::param(const Matrix& value, Matrix* grad) {
    Node n{Op::Param, {}, value, {}, 0.0, 0, 0, grad};
    return push(std::move(n));
}

Graph::Id Graph::matmul(Id a, Id b) {
    Node n{Op::MatMul, {a, b}, mat_mul(value(a), value(b)), {}, 0.0, 0, 0, nullptr};
    return push(std::move(n));
}

Graph::Id Graph::add(Id a, Id b) {
    const Matrix& x = value(a);
    const Matrix& y = value(b);
    if (!x.same_shape(y)) throw std::invalid_argument("add: shapes disagree");
    Matrix out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out.a[i] += y.a[i];
    return push(Node{Op::Add, {a, b}, std::move(out), {}, 0.0, 0, 0, nullptr});
}

Graph::Id Graph::add_colvec(Id a, Id v) {
    const Matrix& x = value(a);
    const Matrix& b = value(v);
    if (b.cols != 1 || b.rows != x.rows) throw std::invalid_argument("add_colvec: bias shape");
    Matrix out = x;
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out.at(i, j) += b.at(i, 0);
    return push(Node{Op::AddColVec, {a, v}, std::move(out), {}, 0.0, 0, 0, nullptr});
}

Graph::Id Graph::relu(Id a) {
    Matrix out = value(a);
    for (double& x : out.a) x = std::max(0.0, x);
    return push(Node{Op::Relu, {a}, std::move(out), {}, 0.0, 0, 0, nullptr});
}

Graph::Id Graph::scale(Id a, double s) {
    Matrix out = value(a);
    for (double& x : out.a) x *= s;
    return push(Node{Op::Scale, {a}, std::move(out), {}, s, 0, 0, nullptr});
}

Graph::Id Graph::transpose(Id a) {
    return push(Node{Op::Transpose, {a}, mat_transpose(value(a)), {}, 0.0, 0, 0, nullptr});
}

Graph::Id Graph::softmax_rows(Id a) {
    Matrix out = value(a);
    for (int i = 0; i < out.rows; ++i) {
        double mx = out.at(i, 0);
        for (int j = 1; j < out.cols; ++j) mx = std::max(mx, out.at(i, j));
        double sum = 0.0;
        for (int j = 0; j < out.cols; ++j) {
            out.at(i, j) = std::exp(out.at(i, j) - mx);
            sum += out.at(i, j);
        }
        for (int j = 0; j < out.cols; ++j) out.at(i, j) /= sum;
    }
    return push(Node{Op::SoftmaxRows, {a}, std::move(out), {}, 0.0, 0, 0, nullptr});
}

Graph::Id Graph::mean_cols(Id a) {
    const Matrix& x = value(a);
    Matrix out(x.rows, 1);
    for (int i = 0; i < x.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < x.cols; ++j) s += x.at(i, j);
        out.at(i, 0) = s / x.cols;
    }
    return push(Node{Op::MeanCols, {a}, std::move(out), {}, 0.0, 0, 0, nullptr});
}

Graph::Id Graph::log_softmax_col(Id a) {
    const Matrix& x = value(a);
    if (x.cols != 1) throw std::invalid_argument("log_softmax_col: expected column vector");
    Matrix out = x;
    double mx = out.at(0, 0);
    for (int i = 1; i < out.rows; ++i) mx = std::max(mx, out.at(i, 0));
    double sum = 0.0;
    for (int i = 0; i < out.rows; ++i) sum += std::exp(out.at(i, 0) - mx);
    const double lse = mx + std::log(sum);
    for (int i = 0; i < out.rows; ++i) out.at(i, 0) -= lse;
    return push(Node{Op::LogSoftmaxCol, {a}, std::move(out), {}, 0.0, 0, 0, nullptr});
}

Graph::Id Graph::pick(Id a, int r, int c) {
    const Matrix& x = value(a);
    if (r < 0 || r >= x.rows || c < 0 || c >= x.cols) throw std::out_of_range("pick: index");
    Matrix out(1, 1);
    out.at(0, 0) = x.at(r, c);
    return push(Node{Op::Pick, {a}, std::move(out), {}, 0.0, r, c, nullptr});
}

Graph::Id Graph::hcat(const std::vector<Id>& cols) {
    if (cols.empty()) throw std::invalid_argument("hcat: no columns");
    const int rows = value(cols[0]).rows;
    Matrix out(rows, static_cast<int>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const Matrix& v = value(cols[j]);
        if (v.cols != 1 || v.rows != rows) throw std::invalid_argument("hcat: column shape");
        for (int i = 0; i < rows; ++i) out.at(i, static_cast<int>(j)) = v.at(i, 0);
    }
    return push(Node{Op::HCat, cols, std::move(out), {}, 0.0, 0, 0, nullptr});
}

void Graph::backward(Id root) {
    Node& r = nodes_[static_cast<std::size_t>(root)];
    if (r.val.rows != 1 || r.val.cols != 1)
        throw std::invalid_argument("backward: root must be a scalar");

    for (Node& n : nodes_) n.grad = Matrix();
    r.grad = Matrix(1, 1);
    r.grad.at(0, 0) = 1.0;

    auto grad_of = [&](Id id) -> Matrix& {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.grad.size() == 0) n.grad = Matrix(n.val.rows, n.val.cols);
        return n.grad;
    };

    for (Id id = root; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.grad.size() == 0) continue;  // not on any path to root
        const Matrix& g = n.grad;
        switch (n.op) {
            case Op::Const:
                break;
            case Op::Param:
                if (n.bound_grad) {
                    if (n.bound_grad->size() == 0) *n.bound_grad = Matrix(n.val.rows, n.val.cols);
                    for (std::size_t i = 0; i < g.size(); ++i) n.bound_grad->a[i] += g.a[i];
                }
                break;
            case Op::MatMul: {
                const Matrix& a = value(n.src[0]);
                const Matrix& b = value(n.src[1]);
                Matrix& ga = grad_of(n.src[0]);
                Matrix& gb = grad_of(n.src[1]);
                // ga += g * b^T ; gb += a^T * g
                for (int i = 0; i < a.rows; ++i)
                    for (int j = 0; j < g.cols; ++j) {
                        const double gij = g.at(i, j);
                        if (gij == 0.0) continue;
                        for (int k = 0; k < a.cols; ++k) ga.at(i, k) += gij * b.at(k, j);
                    }
                for (int k = 0; k < b.rows; ++k)
                    for (int i = 0; i < a.rows; ++i) {
                        const double aik = a.at(i, k);
                        if (aik == 0.0) continue;
                        for (int j = 0; j < b.cols; ++j) gb.at(k, j) += aik * g.at(i, j);
                    }
                break;
            }
            case Op::Add: {
                Matrix& ga = grad_of(n.src[0]);
                Matrix& gb = grad_of(n.src[1]);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga.a[i] += g.a[i];
                    gb.a[i] += g.a[i];
                }
                break;
            }
            case Op::AddColVec: {
                Matrix& ga = grad_of(n.src[0]);
                Matrix& gv = grad_of(n.src[1]);
                for (int i = 0; i < g.rows; ++i)
                    for (int j = 0; j < g.cols; ++j) {
                        ga.at(i, j) += g.at(i, j);
                        gv.at(i, 0) += g.at(i, j);
                    }
                break;
            }
            case Op::Relu: {
                const Matrix& x = value(n.src[0]);
                Matrix& ga = grad_of(n.src[0]);
                for (std::size_t i = 0; i < g.size(); ++i)
                    if (x.a[i] > 0.0) ga.a[i] += g.a[i];
                break;
            }
            case Op::Scale: {
                Matrix& ga = grad_of(n.src[0]);
                for (std::size_t i = 0; i < g.size(); ++i) ga.a[i] += g.a[i] * n.scalar;
                break;
            }
            case Op::Transpose: {
                Matrix& ga = grad_of(n.src[0]);
                for (int i = 0; i < g.rows; ++i)
                    for (int j = 0; j < g.cols; ++j) ga.at(j, i) += g.at(i, j);
                break;
            }
            case Op::SoftmaxRows: {
                // dX_ij = Y_ij * (dY_ij - sum_k dY_ik Y_ik)
                const Matrix& y = n.val;
                Matrix& ga = grad_of(n.src[0]);
                for (int i = 0; i < y.rows; ++i) {
                    double dot = 0.0;
                    for (int j = 0; j < y.cols; ++j) dot += g.at(i, j) * y.at(i, j);
                    for (int j = 0; j < y.cols; ++j)
                        ga.at(i, j) += y.at(i, j) * (g.at(i, j) - dot);
                }
                break;
            }
            case Op::MeanCols: {
                const Matrix& x = value(n.src[0]);
                Matrix& ga = grad_of(n.src[0]);
                for (int i = 0; i < x.rows; ++i)
                    for (int j = 0; j < x.cols; ++j) ga.at(i, j) += g.at(i, 0) / x.cols;
                break;
            }
            case Op::LogSoftmaxCol: {
                // dx_i = dy_i - softmax(x)_i * sum(dy)
                const Matrix& y = n.val;
                Matrix& ga = grad_of(n.src[0]);
                double gsum = 0.0;
                for (int i = 0; i < y.rows; ++i) gsum += g.at(i, 0);
                for (int i = 0; i < y.rows; ++i)
                    ga.at(i, 0) += g.at(i, 0) - std::exp(y.at(i, 0)) * gsum;
                break;
            }
            case Op::Pick: {
                Matrix& ga = grad_of(n.src[0]);
                ga.at(n.pr, n.pc) += g.at(0, 0);
                break;
            }
            case Op::HCat: {
                for (std::size_t j = 0; j < n.src.size(); ++j) {
                    Matrix& gj = grad_of(n.src[j]);
                    for (int i = 0; i < g.rows; ++i) gj.at(i, 0) += g.at(i, static_cast<int>(j));
                }
                break;
            }
        }
    }
}

}  // namespace tot::net
