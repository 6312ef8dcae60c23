#pragma once

#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jointsem/autodiff/parameters.hpp"

namespace jointsem::autodiff {

enum class Op {
  Input,
  Parameter,
  Lookup,
  Concat,
  Slice,
  Affine,
  Add,
  Sub,
  Scale,
  Sum,
  Tanh,
  Sigmoid,
  CwiseProduct,
  Inner,
  SumElements,
  Abs,
  External,
};

const char* op_name(Op op);

template <typename Scalar>
class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
template <typename Scalar>
struct Expr {
  Graph<Scalar>* graph = nullptr;
  int id = -1;

  const Matrix<Scalar>& value() const { return graph->value(*this); }
  Scalar scalar() const { return graph->scalar(*this); }
};

/// Eager reverse-mode tape. Values are computed at node creation; forward()
/// replays the tape against the current parameter values, backward()
/// accumulates gradients into the parameter store.
template <typename Scalar>
class Graph {
 public:
  using M = Matrix<Scalar>;
  using E = Expr<Scalar>;

  explicit Graph(ParameterStore<Scalar>* store = nullptr) : store_(store) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  int size() const { return static_cast<int>(nodes_.size()); }
  ParameterStore<Scalar>* store() const { return store_; }

  E input(M value) {
    Node node{Op::Input};
    node.value = std::move(value);
    return push(std::move(node));
  }
  E input(Scalar value) { return input(M::Constant(1, 1, value)); }

  E parameter(int param) {
    require_store("parameter");
    Node node{Op::Parameter};
    node.param = param;
    (void)(*store_)[param];
    return push(std::move(node));
  }

  E lookup(int param, int column) {
    require_store("lookup");
    const auto& table = (*store_)[param].value;
    if (column < 0 || column >= table.cols()) {
      throw std::out_of_range("lookup column " + std::to_string(column) + " outside table '" +
                              (*store_)[param].name + "'");
    }
    Node node{Op::Lookup};
    node.param = param;
    node.offset = column;
    node.value = table.col(column);
    return push(std::move(node));
  }

  E concat(std::span<const E> parts) {
    Node node{Op::Concat};
    for (const E& p : parts) {
      if (value(p).cols() != 1) shape_error(node.op, "inputs must be column vectors", {p});
      node.inputs.push_back(p.id);
    }
    node.value = compute(node);
    return push(std::move(node));
  }
  E concat(std::initializer_list<E> parts) { return concat(std::span<const E>(parts.begin(), parts.size())); }

  E slice(E x, Eigen::Index offset, Eigen::Index extent) {
    if (offset < 0 || extent <= 0 || offset + extent > value(x).rows() || value(x).cols() != 1) {
      shape_error(Op::Slice, "rows [" + std::to_string(offset) + "," +
                                 std::to_string(offset + extent) + ") out of range",
                  {x});
    }
    Node node{Op::Slice, {x.id}};
    node.offset = offset;
    node.extent = extent;
    node.value = compute(node);
    return push(std::move(node));
  }

  /// W·x (+ b).
  E affine(E w, E x, E b) { return affine_impl({w.id, x.id, b.id}); }
  E affine(E w, E x) { return affine_impl({w.id, x.id}); }

  E add(E a, E b) { return binary_same_shape(Op::Add, a, b); }
  E sub(E a, E b) { return binary_same_shape(Op::Sub, a, b); }
  E cwise_product(E a, E b) { return binary_same_shape(Op::CwiseProduct, a, b); }

  E scale(E a, Scalar factor) {
    Node node{Op::Scale, {a.id}};
    node.factor = factor;
    node.value = compute(node);
    return push(std::move(node));
  }

  /// n-ary sum of equally shaped nodes. An empty list yields the scalar 0.
  E sum(std::span<const E> terms) {
    if (terms.empty()) return input(Scalar(0));
    Node node{Op::Sum};
    for (const E& t : terms) {
      if (value(t).rows() != value(terms[0]).rows() || value(t).cols() != value(terms[0]).cols()) {
        shape_error(node.op, "operands differ in shape", {terms[0], t});
      }
      node.inputs.push_back(t.id);
    }
    node.value = compute(node);
    return push(std::move(node));
  }

  E tanh(E x) { return unary(Op::Tanh, x); }
  E sigmoid(E x) { return unary(Op::Sigmoid, x); }
  E abs(E x) { return unary(Op::Abs, x); }
  E sum_elements(E x) { return unary(Op::SumElements, x); }

  E inner(E a, E b) {
    if (value(a).size() != value(b).size() || value(a).cols() != 1 || value(b).cols() != 1) {
      shape_error(Op::Inner, "operands must be column vectors of equal length", {a, b});
    }
    Node node{Op::Inner, {a.id, b.id}};
    node.value = compute(node);
    return push(std::move(node));
  }

  /// A scalar whose value and local gradients are supplied by the caller;
  /// d(output)/d(inputs[k]) = local_grads[k]. It is not recomputed by forward().
  E external(std::span<const E> inputs, Scalar value_, std::vector<M> local_grads) {
    if (inputs.size() != local_grads.size()) {
      throw std::invalid_argument("external: one local gradient per input is required");
    }
    Node node{Op::External};
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      if (local_grads[k].rows() != value(inputs[k]).rows() ||
          local_grads[k].cols() != value(inputs[k]).cols()) {
        shape_error(Op::External, "local gradient shape differs from input", {inputs[k]});
      }
      node.inputs.push_back(inputs[k].id);
    }
    node.value = M::Constant(1, 1, value_);
    node.external_grads = std::move(local_grads);
    return push(std::move(node));
  }

  const M& value(E x) const {
    const Node& node = nodes_.at(x.id);
    if (node.op == Op::Parameter) return (*store_)[node.param].value;
    return node.value;
  }

  Scalar scalar(E x) const {
    const M& v = value(x);
    if (v.size() != 1) throw std::invalid_argument("node " + std::to_string(x.id) + " is not a scalar");
    return v(0, 0);
  }

  /// Gradient of the last backward() output with respect to a node.
  M gradient(E x) const {
    const Node& node = nodes_.at(x.id);
    if (node.grad.size() == 0) return M::Zero(value(x).rows(), value(x).cols());
    return node.grad;
  }

  /// Recomputes every node in creation order from the current parameters.
  void forward() {
    for (Node& node : nodes_) {
      switch (node.op) {
        case Op::Input:
        case Op::Parameter:
        case Op::External:
          break;
        case Op::Lookup:
          node.value = (*store_)[node.param].value.col(node.offset);
          break;
        default:
          node.value = compute(node);
      }
    }
  }

  /// Backpropagates from a scalar node; parameter gradients are accumulated
  /// (not overwritten) in the store.
  void backward(E loss) {
    if (value(loss).size() != 1) {
      throw std::invalid_argument("backward: output node " + std::to_string(loss.id) +
                                  " is not scalar");
    }
    for (Node& node : nodes_) node.grad.resize(0, 0);
    nodes_[loss.id].grad = M::Ones(1, 1);
    for (int id = loss.id; id >= 0; --id) {
      Node& node = nodes_[id];
      if (node.grad.size() == 0) continue;
      propagate(node);
    }
  }

 private:
  struct Node {
    explicit Node(Op o, std::vector<int> in = {}) : op(o), inputs(std::move(in)) {}

    Op op;
    std::vector<int> inputs;
    M value;
    M grad;
    int param = -1;
    Eigen::Index offset = 0;
    Eigen::Index extent = 0;
    Scalar factor = Scalar(1);
    std::vector<M> external_grads;
  };

  void require_store(const char* what) const {
    if (store_ == nullptr) throw std::logic_error(std::string(what) + ": graph has no parameter store");
  }

  E push(Node node) {
    nodes_.push_back(std::move(node));
    return E{this, static_cast<int>(nodes_.size()) - 1};
  }

  const M& in(const Node& node, int k) const { return value(E{const_cast<Graph*>(this), node.inputs[k]}); }

  [[noreturn]] void shape_error(Op op, const std::string& what, std::initializer_list<E> operands) const {
    std::ostringstream os;
    os << op_name(op) << " (node " << nodes_.size() << "): " << what << "; operand shapes";
    for (const E& e : operands) os << " #" << e.id << "=" << value(e).rows() << "x" << value(e).cols();
    throw std::invalid_argument(os.str());
  }

  E unary(Op op, E x) {
    Node node{op, {x.id}};
    node.value = compute(node);
    return push(std::move(node));
  }

  E binary_same_shape(Op op, E a, E b) {
    if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
      shape_error(op, "operands differ in shape", {a, b});
    }
    Node node{op, {a.id, b.id}};
    node.value = compute(node);
    return push(std::move(node));
  }

  E affine_impl(std::vector<int> ids) {
    E w{this, ids[0]}, x{this, ids[1]};
    if (value(w).cols() != value(x).rows()) shape_error(Op::Affine, "W·x inner dimensions differ", {w, x});
    if (ids.size() == 3) {
      E b{this, ids[2]};
      if (value(b).rows() != value(w).rows() || value(b).cols() != value(x).cols()) {
        shape_error(Op::Affine, "bias shape differs from W·x", {w, x, b});
      }
    }
    Node node{Op::Affine, std::move(ids)};
    node.value = compute(node);
    return push(std::move(node));
  }

  M compute(const Node& node) const {
    switch (node.op) {
      case Op::Concat: {
        Eigen::Index rows = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k) rows += in(node, k).rows();
        M out(rows, 1);
        Eigen::Index at = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          const M& v = in(node, k);
          out.middleRows(at, v.rows()) = v;
          at += v.rows();
        }
        return out;
      }
      case Op::Slice:
        return in(node, 0).middleRows(node.offset, node.extent);
      case Op::Affine:
        if (node.inputs.size() == 3) return in(node, 0) * in(node, 1) + in(node, 2);
        return in(node, 0) * in(node, 1);
      case Op::Add:
        return in(node, 0) + in(node, 1);
      case Op::Sub:
        return in(node, 0) - in(node, 1);
      case Op::Scale:
        return in(node, 0) * node.factor;
      case Op::Sum: {
        M out = in(node, 0);
        for (std::size_t k = 1; k < node.inputs.size(); ++k) out += in(node, k);
        return out;
      }
      case Op::Tanh:
        return in(node, 0).array().tanh().matrix();
      case Op::Sigmoid:
        return (Scalar(1) / (Scalar(1) + (-in(node, 0).array()).exp())).matrix();
      case Op::CwiseProduct:
        return in(node, 0).cwiseProduct(in(node, 1));
      case Op::Inner:
        return M::Constant(1, 1, in(node, 0).col(0).dot(in(node, 1).col(0)));
      case Op::SumElements:
        return M::Constant(1, 1, in(node, 0).sum());
      case Op::Abs:
        return in(node, 0).cwiseAbs();
      default:
        throw std::logic_error(std::string("compute: unexpected op ") + op_name(node.op));
    }
  }

  void accumulate(int id, const M& delta) {
    Node& target = nodes_[id];
    if (target.grad.size() == 0) {
      target.grad = delta;
    } else {
      target.grad += delta;
    }
  }

  void propagate(const Node& node) {
    const M& g = node.grad;
    switch (node.op) {
      case Op::Input:
        break;
      case Op::Parameter:
        (*store_)[node.param].grad += g;
        break;
      case Op::Lookup:
        (*store_)[node.param].grad.col(node.offset) += g;
        break;
      case Op::Concat: {
        Eigen::Index at = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          Eigen::Index rows = in(node, k).rows();
          accumulate(node.inputs[k], g.middleRows(at, rows));
          at += rows;
        }
        break;
      }
      case Op::Slice: {
        M full = M::Zero(in(node, 0).rows(), 1);
        full.middleRows(node.offset, node.extent) = g;
        accumulate(node.inputs[0], full);
        break;
      }
      case Op::Affine:
        accumulate(node.inputs[0], g * in(node, 1).transpose());
        accumulate(node.inputs[1], in(node, 0).transpose() * g);
        if (node.inputs.size() == 3) accumulate(node.inputs[2], g);
        break;
      case Op::Add:
        accumulate(node.inputs[0], g);
        accumulate(node.inputs[1], g);
        break;
      case Op::Sub:
        accumulate(node.inputs[0], g);
        accumulate(node.inputs[1], -g);
        break;
      case Op::Scale:
        accumulate(node.inputs[0], g * node.factor);
        break;
      case Op::Sum:
        for (int id : node.inputs) accumulate(id, g);
        break;
      case Op::Tanh:
        accumulate(node.inputs[0],
                   g.cwiseProduct((Scalar(1) - node.value.array().square()).matrix()));
        break;
      case Op::Sigmoid:
        accumulate(node.inputs[0],
                   g.cwiseProduct((node.value.array() * (Scalar(1) - node.value.array())).matrix()));
        break;
      case Op::CwiseProduct:
        accumulate(node.inputs[0], g.cwiseProduct(in(node, 1)));
        accumulate(node.inputs[1], g.cwiseProduct(in(node, 0)));
        break;
      case Op::Inner:
        accumulate(node.inputs[0], in(node, 1) * g(0, 0));
        accumulate(node.inputs[1], in(node, 0) * g(0, 0));
        break;
      case Op::SumElements:
        accumulate(node.inputs[0], M::Constant(in(node, 0).rows(), in(node, 0).cols(), g(0, 0)));
        break;
      case Op::Abs: {
        // Subgradient of |x| is sign(x), with 0 at x = 0.
        M sign = in(node, 0).unaryExpr([](Scalar v) { return Scalar((v > 0) - (v < 0)); });
        accumulate(node.inputs[0], g.cwiseProduct(sign));
        break;
      }
      case Op::External:
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          accumulate(node.inputs[k], node.external_grads[k] * g(0, 0));
        }
        break;
    }
  }

  ParameterStore<Scalar>* store_;
  std::vector<Node> nodes_;
};

inline const char* op_name(Op op) {
  switch (op) {
    case Op::Input: return "input";
    case Op::Parameter: return "parameter";
    case Op::Lookup: return "lookup";
    case Op::Concat: return "concat";
    case Op::Slice: return "slice";
    case Op::Affine: return "affine";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Scale: return "scale";
    case Op::Sum: return "sum";
    case Op::Tanh: return "tanh";
    case Op::Sigmoid: return "sigmoid";
    case Op::CwiseProduct: return "cwise_product";
    case Op::Inner: return "inner";
    case Op::SumElements: return "sum_elements";
    case Op::Abs: return "abs";
    case Op::External: return "external";
  }
  return "?";
}

// Expression-style free functions.

template <typename S> Expr<S> operator+(Expr<S> a, Expr<S> b) { return a.graph->add(a, b); }
template <typename S> Expr<S> operator-(Expr<S> a, Expr<S> b) { return a.graph->sub(a, b); }
template <typename S> Expr<S> operator*(Expr<S> a, S factor) { return a.graph->scale(a, factor); }
template <typename S> Expr<S> operator*(S factor, Expr<S> a) { return a.graph->scale(a, factor); }
template <typename S> Expr<S> tanh(Expr<S> x) { return x.graph->tanh(x); }
template <typename S> Expr<S> sigmoid(Expr<S> x) { return x.graph->sigmoid(x); }
template <typename S> Expr<S> abs(Expr<S> x) { return x.graph->abs(x); }
template <typename S> Expr<S> sum_elements(Expr<S> x) { return x.graph->sum_elements(x); }
template <typename S> Expr<S> dot(Expr<S> a, Expr<S> b) { return a.graph->inner(a, b); }
template <typename S> Expr<S> cwise_product(Expr<S> a, Expr<S> b) { return a.graph->cwise_product(a, b); }
template <typename S> Expr<S> affine(Expr<S> w, Expr<S> x, Expr<S> b) { return w.graph->affine(w, x, b); }
template <typename S> Expr<S> affine(Expr<S> w, Expr<S> x) { return w.graph->affine(w, x); }

template <typename S>
Expr<S> sum(std::span<const Expr<S>> terms, Graph<S>& graph) {
  return graph.sum(terms);
}

}  // namespace jointsem::autodiff
