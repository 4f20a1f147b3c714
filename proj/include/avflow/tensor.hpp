#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace avflow {

using Scalar = double;
using Shape = std::vector<std::size_t>;

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Thread-local switch; ops recorded on the tape only while enabled.
bool grad_enabled();
void set_grad_enabled(bool on);

struct NoGradGuard {
    NoGradGuard() : prev_(grad_enabled()) { set_grad_enabled(false); }
    ~NoGradGuard() { set_grad_enabled(prev_); }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

struct Node {
    Shape shape;
    std::vector<Scalar> data;
    std::vector<Scalar> grad;   // allocated lazily, same length as data
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;  // adds into parents' grad

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), Scalar(0));
    }
};

// Shared-ownership handle over a graph node. Copies alias the same storage.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

    static Tensor zeros(const Shape& shape, bool requires_grad = false);
    static Tensor full(const Shape& shape, Scalar value, bool requires_grad = false);
    static Tensor from_data(const Shape& shape, std::vector<Scalar> values,
                            bool requires_grad = false);
    static Tensor scalar(Scalar value, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t size() const { return node_->data.size(); }
    std::size_t rank() const { return node_->shape.size(); }

    std::vector<Scalar>& data() { return node_->data; }
    const std::vector<Scalar>& data() const { return node_->data; }
    Scalar item() const;

    bool requires_grad() const { return node_->requires_grad; }
    Tensor& set_requires_grad(bool on);
    std::vector<Scalar>& grad();
    void zero_grad();

    // Reverse-mode sweep from a scalar node.
    void backward() const;

    // Same values, detached from the tape.
    Tensor detach() const;

    std::shared_ptr<Node> node() const { return node_; }

private:
    std::shared_ptr<Node> node_;
};

// Elementwise, same shape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& x);

Tensor add_scalar(const Tensor& x, Scalar c);
Tensor mul_scalar(const Tensor& x, Scalar c);

// x: [..., D], bias: [D], broadcast over leading dims.
Tensor add_bias(const Tensor& x, const Tensor& bias);

// Rank 2 or rank 3 (leading batch dim); a rank-2 operand broadcasts across the batch.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor softmax(const Tensor& x, int axis = -1);
Tensor sigmoid(const Tensor& x);
Tensor silu(const Tensor& x);
Tensor log_op(const Tensor& x);
Tensor clamp(const Tensor& x, Scalar lo, Scalar hi);

// Normalizes the last axis; gamma/beta: [D].
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  Scalar eps = 1e-5);

Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);

Tensor reshape(const Tensor& x, const Shape& shape);
Tensor transpose(const Tensor& x, int axis_a, int axis_b);
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice(const Tensor& x, int axis, std::size_t begin, std::size_t end);

// table: [V, D]; result: [ids.size(), D].
Tensor embedding(const Tensor& table, const std::vector<int>& ids);

// x: [1, D] -> [n, D].
Tensor tile_rows(const Tensor& x, std::size_t n);

bool all_finite(const Tensor& x);

}  // namespace avflow
