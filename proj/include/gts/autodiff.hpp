#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace gts::ad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  const Matrix& value() const;
  int id() const { return id_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Reverse-mode tape over dense matrices. Parameters are views into a flat
/// vector; gradient() scatters their adjoints back into that layout.
///
/// Binary elementwise ops broadcast a 1 x c right operand across the rows of
/// an n x c left operand.
class Tape {
 public:
  /// Leaf whose gradient lands in flat[offset, offset + rows*cols), column-major.
  Var parameter(const Vector& flat, std::size_t offset, Eigen::Index rows, Eigen::Index cols);
  Var constant(Matrix value);

  Var affine(Var x, Var w, Var b);  // x * w + b (b broadcast over rows)
  Var tanh(Var x);
  Var exp(Var x);
  Var square(Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var row_sum(Var a);  // n x c -> n x 1
  Var sum(Var a);      // -> 1 x 1

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id_)].value; }
  double scalar(Var v) const;

  /// Backpropagates from a 1 x 1 output; returns d(output)/d(flat).
  Vector gradient(Var output, Eigen::Index n_params) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op { parameter, constant, affine, tanh, exp, square, add, sub, mul, scale, row_sum, sum };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    int c = -1;
    double s = 0.0;
    std::size_t offset = 0;
    Matrix value{};
  };

  Var push(Node node);
  void check(Var v) const;

  std::vector<Node> nodes_;
};

}  // namespace gts::ad
