#include "gluco/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace gluco {

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

double* TensorImpl::grad_data() {
    if (grad.empty()) grad.assign(values.size(), 0.0);
    return grad.data();
}

namespace {

thread_local bool g_grad_enabled = true;

void check_shape(const Shape& shape) {
    for (int d : shape) {
        if (d <= 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
    }
}

}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

Tensor::Tensor(Shape shape, double fill, bool requires_grad) {
    check_shape(shape);
    impl_ = std::make_shared<TensorImpl>();
    impl_->values.assign(numel(shape), fill);
    impl_->shape = std::move(shape);
    impl_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
    check_shape(shape);
    if (numel(shape) != values.size()) {
        throw ShapeError("value count " + std::to_string(values.size()) +
                         " does not fill shape " + shape_str(shape));
    }
    impl_ = std::make_shared<TensorImpl>();
    impl_->shape = std::move(shape);
    impl_->values = std::move(values);
    impl_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return Tensor{Shape{1}, std::vector<double>{v}, requires_grad};
}

const Shape& Tensor::shape() const { return impl_->shape; }
int Tensor::ndim() const { return static_cast<int>(impl_->shape.size()); }
int Tensor::dim(int axis) const { return impl_->shape.at(static_cast<std::size_t>(axis)); }
std::size_t Tensor::size() const { return impl_->values.size(); }

std::vector<double>& Tensor::values() { return impl_->values; }
const std::vector<double>& Tensor::values() const { return impl_->values; }
double* Tensor::data() { return impl_->values.data(); }
const double* Tensor::data() const { return impl_->values.data(); }

double Tensor::at(int i) const { return impl_->values.at(static_cast<std::size_t>(i)); }
double& Tensor::at(int i) { return impl_->values.at(static_cast<std::size_t>(i)); }

double Tensor::at(int i, int j) const {
    if (ndim() != 2) throw ShapeError("2-d indexing into tensor of shape " + shape_str(shape()));
    return impl_->values.at(static_cast<std::size_t>(i) * dim(1) + j);
}

double& Tensor::at(int i, int j) {
    if (ndim() != 2) throw ShapeError("2-d indexing into tensor of shape " + shape_str(shape()));
    return impl_->values.at(static_cast<std::size_t>(i) * dim(1) + j);
}

double Tensor::value() const {
    if (size() != 1) {
        throw ContractError("scalar read from tensor of shape " + shape_str(shape()));
    }
    return impl_->values[0];
}

bool Tensor::requires_grad() const { return impl_->requires_grad; }

Tensor& Tensor::set_requires_grad(bool on) {
    impl_->requires_grad = on;
    return *this;
}

bool Tensor::has_grad() const { return impl_ && !impl_->grad.empty(); }

const std::vector<double>& Tensor::grad() const {
    if (!has_grad()) {
        throw ContractError("gradient not populated; run backward() first");
    }
    return impl_->grad;
}

void Tensor::zero_grad() {
    if (impl_ && !impl_->grad.empty()) {
        std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
    }
}

void Tensor::backward() const {
    if (!impl_) throw ContractError("backward on an undefined tensor");
    if (size() != 1) {
        throw ContractError("backward requires a scalar loss, got shape " + shape_str(shape()));
    }
    if (!impl_->node && !impl_->requires_grad) {
        throw ContractError("backward on a tensor with no graph attached");
    }

    // Post-order over the DAG: every node appears after all of its parents,
    // so the reversed list runs each node before the nodes it feeds from.
    std::vector<GraphNode*> order;
    std::unordered_set<GraphNode*> seen;
    std::vector<std::pair<GraphNode*, std::size_t>> stack;
    if (impl_->node) {
        if (seen.insert(impl_->node.get()).second) stack.emplace_back(impl_->node.get(), 0);
    }
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            GraphNode* p = node->parents[next++]->node.get();
            if (p && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (GraphNode* n : order) {
        if (n->consumed) {
            throw ContractError("backward already ran on this graph; rebuild the "
                                "forward pass before differentiating again");
        }
    }

    impl_->grad_data()[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        GraphNode* n = *it;
        n->backprop();
        n->consumed = true;
    }
}

Tensor Tensor::clone() const {
    return Tensor{impl_->shape, impl_->values, impl_->requires_grad};
}

}  // namespace gluco
