#include "gts/autodiff.hpp"

#include <cmath>

#include "gts/error.hpp"

namespace gts::ad {

namespace {

bool broadcasts(const Matrix& a, const Matrix& b) {
  return b.rows() == 1 && a.rows() != 1 && a.cols() == b.cols();
}

void require_compatible(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return;
  if (broadcasts(a, b)) return;
  throw InputError(std::string("shape mismatch in ") + op);
}

// Sums an adjoint down to the operand's shape (undoes row broadcasting).
Matrix reduce_to(const Matrix& adj, const Matrix& like) {
  if (adj.rows() == like.rows()) return adj;
  return adj.colwise().sum();
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(*this); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

void Tape::check(Var v) const {
  if (v.tape_ != this || v.id_ < 0 || static_cast<std::size_t>(v.id_) >= nodes_.size())
    throw InputError("variable does not belong to this tape");
}

Var Tape::parameter(const Vector& flat, std::size_t offset, Eigen::Index rows, Eigen::Index cols) {
  if (offset + static_cast<std::size_t>(rows * cols) > static_cast<std::size_t>(flat.size()))
    throw InputError("parameter block exceeds the flat vector");
  Node n{Op::parameter};
  n.offset = offset;
  n.value = Eigen::Map<const Matrix>(flat.data() + offset, rows, cols);
  return push(std::move(n));
}

Var Tape::constant(Matrix value) {
  Node n{Op::constant};
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::affine(Var x, Var w, Var b) {
  check(x), check(w), check(b);
  const Matrix& xv = value(x);
  const Matrix& wv = value(w);
  const Matrix& bv = value(b);
  if (xv.cols() != wv.rows() || bv.rows() != 1 || bv.cols() != wv.cols())
    throw InputError("shape mismatch in affine");
  Node n{Op::affine, x.id_, w.id_, b.id_};
  n.value = xv * wv;
  n.value.rowwise() += bv.row(0);
  return push(std::move(n));
}

Var Tape::tanh(Var x) {
  check(x);
  Node n{Op::tanh, x.id_};
  n.value = value(x).array().tanh().matrix();
  return push(std::move(n));
}

Var Tape::exp(Var x) {
  check(x);
  Node n{Op::exp, x.id_};
  n.value = value(x).array().exp().matrix();
  return push(std::move(n));
}

Var Tape::square(Var x) {
  check(x);
  Node n{Op::square, x.id_};
  n.value = value(x).array().square().matrix();
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  check(a), check(b);
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  require_compatible(av, bv, "add");
  Node n{Op::add, a.id_, b.id_};
  if (broadcasts(av, bv)) {
    n.value = av;
    n.value.rowwise() += bv.row(0);
  } else {
    n.value = av + bv;
  }
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  check(a), check(b);
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  require_compatible(av, bv, "sub");
  Node n{Op::sub, a.id_, b.id_};
  if (broadcasts(av, bv)) {
    n.value = av;
    n.value.rowwise() -= bv.row(0);
  } else {
    n.value = av - bv;
  }
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  check(a), check(b);
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  require_compatible(av, bv, "mul");
  Node n{Op::mul, a.id_, b.id_};
  if (broadcasts(av, bv)) {
    n.value = av.array().rowwise() * bv.row(0).array();
  } else {
    n.value = av.cwiseProduct(bv);
  }
  return push(std::move(n));
}

Var Tape::scale(Var a, double s) {
  check(a);
  Node n{Op::scale, a.id_};
  n.s = s;
  n.value = value(a) * s;
  return push(std::move(n));
}

Var Tape::row_sum(Var a) {
  check(a);
  Node n{Op::row_sum, a.id_};
  n.value = value(a).rowwise().sum();
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  check(a);
  Node n{Op::sum, a.id_};
  n.value = Matrix::Constant(1, 1, value(a).sum());
  return push(std::move(n));
}

double Tape::scalar(Var v) const {
  check(v);
  const Matrix& m = value(v);
  if (m.size() != 1) throw InputError("node is not a scalar");
  return m(0, 0);
}

Vector Tape::gradient(Var output, Eigen::Index n_params) const {
  check(output);
  if (value(output).size() != 1) throw InputError("gradient() needs a scalar output");

  const std::size_t count = static_cast<std::size_t>(output.id_) + 1;
  std::vector<Matrix> adj(count);
  std::vector<bool> live(count, false);
  adj[count - 1] = Matrix::Ones(1, 1);
  live[count - 1] = true;

  auto accumulate = [&](int id, Matrix contribution) {
    auto& slot = adj[static_cast<std::size_t>(id)];
    if (!live[static_cast<std::size_t>(id)]) {
      slot = std::move(contribution);
      live[static_cast<std::size_t>(id)] = true;
    } else {
      slot += contribution;
    }
  };

  Vector grad = Vector::Zero(n_params);
  for (std::size_t i = count; i-- > 0;) {
    if (!live[i]) continue;
    const Node& n = nodes_[i];
    const Matrix& g = adj[i];
    switch (n.op) {
      case Op::parameter: {
        if (n.offset + static_cast<std::size_t>(g.size()) > static_cast<std::size_t>(n_params))
          throw InputError("parameter block exceeds the gradient length");
        Eigen::Map<Matrix>(grad.data() + n.offset, g.rows(), g.cols()) += g;
        break;
      }
      case Op::constant:
        break;
      case Op::affine: {
        const Matrix& x = nodes_[static_cast<std::size_t>(n.a)].value;
        const Matrix& w = nodes_[static_cast<std::size_t>(n.b)].value;
        accumulate(n.a, g * w.transpose());
        accumulate(n.b, x.transpose() * g);
        accumulate(n.c, g.colwise().sum());
        break;
      }
      case Op::tanh:
        accumulate(n.a, (g.array() * (1.0 - n.value.array().square())).matrix());
        break;
      case Op::exp:
        accumulate(n.a, g.cwiseProduct(n.value));
        break;
      case Op::square:
        accumulate(n.a, (2.0 * g.array() * nodes_[static_cast<std::size_t>(n.a)].value.array()).matrix());
        break;
      case Op::add:
        accumulate(n.a, g);
        accumulate(n.b, reduce_to(g, nodes_[static_cast<std::size_t>(n.b)].value));
        break;
      case Op::sub:
        accumulate(n.a, g);
        accumulate(n.b, -reduce_to(g, nodes_[static_cast<std::size_t>(n.b)].value));
        break;
      case Op::mul: {
        const Matrix& av = nodes_[static_cast<std::size_t>(n.a)].value;
        const Matrix& bv = nodes_[static_cast<std::size_t>(n.b)].value;
        if (broadcasts(av, bv)) {
          accumulate(n.a, (g.array().rowwise() * bv.row(0).array()).matrix());
          accumulate(n.b, g.cwiseProduct(av).colwise().sum());
        } else {
          accumulate(n.a, g.cwiseProduct(bv));
          accumulate(n.b, g.cwiseProduct(av));
        }
        break;
      }
      case Op::scale:
        accumulate(n.a, g * n.s);
        break;
      case Op::row_sum: {
        const Matrix& av = nodes_[static_cast<std::size_t>(n.a)].value;
        accumulate(n.a, g.replicate(1, av.cols()));
        break;
      }
      case Op::sum: {
        const Matrix& av = nodes_[static_cast<std::size_t>(n.a)].value;
        accumulate(n.a, Matrix::Constant(av.rows(), av.cols(), g(0, 0)));
        break;
      }
    }
  }
  return grad;
}

}  // namespace gts::ad
