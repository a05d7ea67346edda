#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gluco {

// Thrown when operand dimensions do not line up.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when an operation is used outside its stated contract.
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Shape = std::vector<int>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

struct TensorImpl;

// One recorded op in the backward graph. `backprop` reads the output
// gradient and accumulates into the parents' gradients. A node runs
// exactly once per backward pass; running it again is a contract error.
struct GraphNode {
    const char* op = "?";
    std::vector<std::shared_ptr<TensorImpl>> parents;
    std::function<void()> backprop;
    bool consumed = false;
};

struct TensorImpl {
    Shape shape;
    std::vector<double> values;
    bool requires_grad = false;
    std::vector<double> grad;           // empty until backward touches it
    std::shared_ptr<GraphNode> node;    // null for leaves

    // Lazily allocates a zeroed gradient buffer of the tensor's shape.
    double* grad_data();
};

/// Dense row-major tensor of doubles with a define-by-run backward graph.
///
/// Copies of a Tensor are shallow: they share the same storage and graph
/// node. Ops return fresh tensors; when autograd is enabled and any input
/// participates in the graph, the result carries a GraphNode wiring it to
/// its parents. Tensors and their graphs are confined to one thread.
class Tensor {
public:
    Tensor() = default;  // undefined handle
    explicit Tensor(Shape shape, double fill = 0.0, bool requires_grad = false);
    Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }

    const Shape& shape() const;
    int ndim() const;
    int dim(int axis) const;
    std::size_t size() const;

    std::vector<double>& values();
    const std::vector<double>& values() const;
    double* data();
    const double* data() const;

    double at(int i) const;
    double& at(int i);
    double at(int i, int j) const;
    double& at(int i, int j);

    // Scalar read; throws ContractError unless size() == 1.
    double value() const;

    bool requires_grad() const;
    Tensor& set_requires_grad(bool on);

    bool has_grad() const;
    const std::vector<double>& grad() const;  // throws if absent
    void zero_grad();

    // Reverse-mode sweep from a scalar. Populates grad on every reachable
    // tensor that requires one. Calling backward twice on the same graph
    // (without rebuilding it) is a contract error.
    void backward() const;

    // Deep copy of values only; the copy is a fresh leaf.
    Tensor clone() const;

    std::shared_ptr<TensorImpl> impl() const { return impl_; }
    explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<TensorImpl> impl_;
};

// Thread-local autograd switch. Evaluation paths disable graph recording.
bool grad_enabled();

struct NoGradGuard {
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

}  // namespace gluco
