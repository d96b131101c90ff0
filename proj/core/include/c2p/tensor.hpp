#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "c2p/error.hpp"

namespace c2p::ag {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // sized on first use, accumulates across backwards
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;  // pushes grad into parents

    std::size_t size() const { return value.size(); }
    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
};

using NodePtr = std::shared_ptr<Node>;

}  // namespace detail

// Dense row-major 64-bit tensor with reverse-mode differentiation.
// Copies share the underlying node (reference semantics); ops build a
// DAG that backward() traverses once in reverse topological order.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double fill, bool requires_grad = false);
    static Tensor from_data(Shape shape, std::vector<double> data,
                            bool requires_grad = false);
    static Tensor scalar_value(double v, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t size() const;
    bool requires_grad() const;

    std::span<const double> data() const;
    std::span<double> mutable_data();  // leaves/parameters only
    std::span<const double> grad() const;
    double at(std::size_t flat_index) const;
    double scalar() const;  // value of a 1-element tensor

    void zero_grad();

    // Same values, detached from the graph (no gradient flow).
    Tensor detach() const;

    detail::NodePtr node() const { return node_; }

private:
    explicit Tensor(detail::NodePtr n) : node_(std::move(n)) {}
    detail::NodePtr node_;

    friend Tensor make_op(Shape, std::vector<double>, std::vector<Tensor>,
                          std::function<void(detail::Node&)>, const char*);
};

// Disables gradient recording for its scope (feature extraction, the
// finite-difference passes of grad_check).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

bool grad_enabled();

// ---- elementwise and linear ops ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, double s);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
// x: [n, d], bias: [d]; adds bias to every row.
Tensor add_bias(const Tensor& x, const Tensor& bias);
Tensor matmul(const Tensor& a, const Tensor& b);  // [n,k] x [k,m]
Tensor transpose(const Tensor& a);                // 2-D
Tensor reshape(const Tensor& a, Shape new_shape);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& rows);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count);

// ---- nonlinearities and reductions ----
Tensor relu(const Tensor& a);  // subgradient at 0 is 0
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sum(const Tensor& a);                    // full reduction to scalar
// Fills `shape` with a 1-element tensor's value; gradient sums back.
Tensor broadcast_scalar(const Tensor& scalar, Shape shape);
Tensor mean(const Tensor& a, std::size_t axis);
Tensor max_pool(const Tensor& a, std::size_t axis);  // grad routes to argmax
Tensor softmax(const Tensor& a, std::size_t axis);   // max-subtracted
// Normalizes over the last axis; gain and bias have that axis' extent.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);
// Divides each lane along `axis` by max(l2-norm, eps).
Tensor l2_normalize(const Tensor& a, std::size_t axis, double eps = 1e-12);

// Multi-head scaled dot-product attention over the row (frame) axis.
// q, k, v: [L, d] with d divisible by heads; per head
// softmax(Q K^T / sqrt(d/heads)) V, heads concatenated back to [L, d].
// Callers apply their own output mixing.
Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v,
                 std::size_t heads);

// Reverse topological order of the graph below a root, each node once.
class Tape {
public:
    explicit Tape(const Tensor& root);

    // Seeds d(root)/d(root) = 1 and accumulates (+=) gradients into every
    // recorded node in reverse order.
    void backward();

    std::size_t node_count() const { return order_.size(); }

private:
    detail::NodePtr root_;
    std::vector<detail::Node*> order_;  // topological, root last
};

// Records the tape below `loss` (a scalar) and runs one backward sweep.
void backward(const Tensor& loss);

// Max relative error between analytic gradients of f at x and central
// finite differences with step h. On return x holds its original values
// and x.grad holds the analytic gradient.
double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x,
                  double h);

}  // namespace c2p::ag
