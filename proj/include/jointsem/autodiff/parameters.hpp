#pragma once

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace jointsem::autodiff {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class ParameterKind { Weight, Bias, Lookup };

template <typename Scalar>
struct Parameter {
  std::string name;
  ParameterKind kind = ParameterKind::Weight;
  Matrix<Scalar> value;
  Matrix<Scalar> grad;
};

/// Named, shape-fixed parameters with gradient accumulators.
///
/// Initialization: weights uniform in ±sqrt(6/(rows+cols)); biases zero;
/// lookup tables (one column per entry) uniform in ±sqrt(3/rows).
template <typename Scalar>
class ParameterStore {
 public:
  int add(const std::string& name, Eigen::Index rows, Eigen::Index cols, ParameterKind kind,
          std::mt19937_64& rng) {
    Matrix<Scalar> value = Matrix<Scalar>::Zero(rows, cols);
    double bound = 0.0;
    if (kind == ParameterKind::Weight) bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    if (kind == ParameterKind::Lookup) bound = std::sqrt(3.0 / static_cast<double>(rows));
    if (bound > 0.0) {
      std::uniform_real_distribution<double> uniform(-bound, bound);
      for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) value(r, c) = static_cast<Scalar>(uniform(rng));
      }
    }
    return add(name, std::move(value), kind);
  }

  int add(const std::string& name, Matrix<Scalar> value, ParameterKind kind) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
    int id = static_cast<int>(params_.size());
    Parameter<Scalar> p;
    p.name = name;
    p.kind = kind;
    p.grad = Matrix<Scalar>::Zero(value.rows(), value.cols());
    p.value = std::move(value);
    params_.push_back(std::move(p));
    index_.emplace(name, id);
    return id;
  }

  /// The existing parameter when the name is taken (its shape must match),
  /// else a freshly initialized one.
  int ensure(const std::string& name, Eigen::Index rows, Eigen::Index cols, ParameterKind kind,
             std::mt19937_64& rng) {
    int existing = find(name);
    if (existing < 0) return add(name, rows, cols, kind, rng);
    const auto& v = params_[existing].value;
    if (v.rows() != rows || v.cols() != cols) {
      throw std::invalid_argument("parameter '" + name + "' is " + std::to_string(v.rows()) + "x" +
                                  std::to_string(v.cols()) + ", expected " + std::to_string(rows) +
                                  "x" + std::to_string(cols));
    }
    return existing;
  }

  /// -1 when absent.
  int find(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  int id(std::string_view name) const {
    int i = find(name);
    if (i < 0) throw std::out_of_range("no parameter named '" + std::string(name) + "'");
    return i;
  }

  Parameter<Scalar>& operator[](int id) { return params_.at(id); }
  const Parameter<Scalar>& operator[](int id) const { return params_.at(id); }

  /// Replaces a value; the shape must not change.
  void set_value(int id, const Matrix<Scalar>& value) {
    auto& p = params_.at(id);
    if (value.rows() != p.value.rows() || value.cols() != p.value.cols()) {
      throw std::invalid_argument("shape change for parameter '" + p.name + "'");
    }
    p.value = value;
  }

  int size() const { return static_cast<int>(params_.size()); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad() {
    for (auto& p : params_) p.grad.setZero();
  }

  /// Coefficient λ of the λ‖w‖² penalty applied in clip_and_step.
  double l2 = 1e-6;
  /// Global gradient norm threshold.
  double clip = 1.0;

 private:
  std::vector<Parameter<Scalar>> params_;
  std::map<std::string, int, std::less<>> index_;
};

}  // namespace jointsem::autodiff
