// SPDX-License-Identifier: Apache-2.0
#include "dsd/autodiff.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace dsd {

namespace {

using MatMap = Eigen::Map<
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                   Eigen::Dynamic,
                                                   Eigen::RowMajor>>;

ConstMatMap as_mat(const Tensor& t) {
  return ConstMatMap(t.data.data(), long(t.rows()), long(t.cols()));
}

MatMap as_mat(Tensor& t) {
  return MatMap(t.data.data(), long(t.rows()), long(t.cols()));
}

void require_matrix(const Tensor& t, const char* who) {
  if (t.shape.size() != 2) throw ShapeMismatch(std::string(who) + ": expected a matrix");
}

}  // namespace

Tape::NodeId Tape::push(Tensor value, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(value), Tensor{}, std::move(back)});
  return NodeId(nodes_.size() - 1);
}

void Tape::accumulate(NodeId id, const Tensor& g) {
  Tensor& dst = nodes_[id].grad;
  if (dst.data.empty()) {
    dst = Tensor::zeros(nodes_[id].value.shape);
  }
  for (std::size_t i = 0; i < g.data.size(); ++i) dst.data[i] += g.data[i];
}

Tape::NodeId Tape::leaf(Tensor value) { return push(std::move(value), nullptr); }

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require_matrix(A, "matmul");
  require_matrix(B, "matmul");
  if (A.cols() != B.rows()) throw ShapeMismatch("matmul: inner dimensions disagree");
  Tensor C = Tensor::zeros({A.rows(), B.cols()});
  as_mat(C) = as_mat(A) * as_mat(B);
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [a, b, id](Tape& t) {
    const Tensor& G = t.grad(id);
    const Tensor& A2 = t.value(a);
    const Tensor& B2 = t.value(b);
    Tensor ga = Tensor::zeros(A2.shape);
    Tensor gb = Tensor::zeros(B2.shape);
    as_mat(ga) = as_mat(G) * as_mat(B2).transpose();
    as_mat(gb) = as_mat(A2).transpose() * as_mat(G);
    t.accumulate(a, ga);
    t.accumulate(b, gb);
  };
  return id;
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.same_shape(B)) {
    Tensor C = A;
    for (std::size_t i = 0; i < C.data.size(); ++i) C.data[i] += B.data[i];
    NodeId id = push(std::move(C), nullptr);
    nodes_[id].back = [a, b, id](Tape& t) {
      t.accumulate(a, t.grad(id));
      t.accumulate(b, t.grad(id));
    };
    return id;
  }
  if (B.is_scalar()) {
    Tensor C = A;
    double s = B.data[0];
    for (double& v : C.data) v += s;
    NodeId id = push(std::move(C), nullptr);
    nodes_[id].back = [a, b, id](Tape& t) {
      t.accumulate(a, t.grad(id));
      double g = 0;
      for (double v : t.grad(id).data) g += v;
      Tensor gb = t.value(b);
      gb.data[0] = g;
      for (std::size_t i = 1; i < gb.data.size(); ++i) gb.data[i] = 0;
      t.accumulate(b, gb);
    };
    return id;
  }
  if (A.is_scalar()) return add(b, a);
  throw ShapeMismatch("add: shapes incompatible");
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.same_shape(B)) {
    Tensor C = A;
    for (std::size_t i = 0; i < C.data.size(); ++i) C.data[i] *= B.data[i];
    NodeId id = push(std::move(C), nullptr);
    nodes_[id].back = [a, b, id](Tape& t) {
      const Tensor& g = t.grad(id);
      Tensor ga = t.value(b);
      Tensor gb = t.value(a);
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        ga.data[i] *= g.data[i];
        gb.data[i] *= g.data[i];
      }
      t.accumulate(a, ga);
      t.accumulate(b, gb);
    };
    return id;
  }
  if (B.is_scalar()) {
    double s = B.data[0];
    Tensor C = A;
    for (double& v : C.data) v *= s;
    NodeId id = push(std::move(C), nullptr);
    nodes_[id].back = [a, b, id, s](Tape& t) {
      const Tensor& g = t.grad(id);
      Tensor ga = g;
      for (double& v : ga.data) v *= s;
      t.accumulate(a, ga);
      double gs = 0;
      const Tensor& A2 = t.value(a);
      for (std::size_t i = 0; i < g.data.size(); ++i) gs += g.data[i] * A2.data[i];
      Tensor gb = t.value(b);
      gb.data[0] = gs;
      t.accumulate(b, gb);
    };
    return id;
  }
  if (A.is_scalar()) return mul(b, a);
  throw ShapeMismatch("mul: shapes incompatible");
}

Tape::NodeId Tape::relu(NodeId a) {
  Tensor C = value(a);
  for (double& v : C.data) v = v > 0 ? v : 0.0;
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [a, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& x = t.value(a);
    Tensor ga = g;
    for (std::size_t i = 0; i < ga.data.size(); ++i)
      if (x.data[i] <= 0) ga.data[i] = 0;  // subgradient 0 at the kink
    t.accumulate(a, ga);
  };
  return id;
}

Tape::NodeId Tape::tanh(NodeId a) {
  Tensor C = value(a);
  for (double& v : C.data) v = std::tanh(v);
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [a, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& y = t.value(id);
    Tensor ga = g;
    for (std::size_t i = 0; i < ga.data.size(); ++i)
      ga.data[i] *= 1.0 - y.data[i] * y.data[i];
    t.accumulate(a, ga);
  };
  return id;
}

Tape::NodeId Tape::exp(NodeId a) {
  Tensor C = value(a);
  for (double& v : C.data) v = std::exp(v);
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [a, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& y = t.value(id);
    Tensor ga = g;
    for (std::size_t i = 0; i < ga.data.size(); ++i) ga.data[i] *= y.data[i];
    t.accumulate(a, ga);
  };
  return id;
}

Tape::NodeId Tape::scale(NodeId a, double s) {
  Tensor C = value(a);
  for (double& v : C.data) v *= s;
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [a, id, s](Tape& t) {
    Tensor ga = t.grad(id);
    for (double& v : ga.data) v *= s;
    t.accumulate(a, ga);
  };
  return id;
}

Tape::NodeId Tape::leaky_relu(NodeId a, double negative_slope) {
  Tensor C = value(a);
  for (double& v : C.data) v = v > 0 ? v : negative_slope * v;
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [a, id, negative_slope](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& x = t.value(a);
    Tensor ga = g;
    for (std::size_t i = 0; i < ga.data.size(); ++i)
      if (x.data[i] <= 0) ga.data[i] *= negative_slope;
    t.accumulate(a, ga);
  };
  return id;
}

Tape::NodeId Tape::add_bias(NodeId x, NodeId bias) {
  const Tensor& X = value(x);
  const Tensor& B = value(bias);
  require_matrix(X, "add_bias");
  if (B.shape.size() != 1 || B.shape[0] != X.cols())
    throw ShapeMismatch("add_bias: bias must be a vector of length cols(x)");
  Tensor C = X;
  std::size_t d = X.cols();
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j) C.data[i * d + j] += B.data[j];
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, bias, id](Tape& t) {
    const Tensor& g = t.grad(id);
    t.accumulate(x, g);
    std::size_t d = t.value(bias).shape[0];
    Tensor gb = Tensor::zeros({d});
    std::size_t n = g.data.size() / d;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) gb.data[j] += g.data[i * d + j];
    t.accumulate(bias, gb);
  };
  return id;
}

Tape::NodeId Tape::sum(NodeId a) {
  double s = 0;
  for (double v : value(a).data) s += v;
  NodeId id = push(Tensor::scalar(s), nullptr);
  nodes_[id].back = [a, id](Tape& t) {
    double g = t.grad(id).data[0];
    Tensor ga = Tensor::full(t.value(a).shape, g);
    t.accumulate(a, ga);
  };
  return id;
}

Tape::NodeId Tape::gather_rows(NodeId x, const std::vector<int>& rows) {
  const Tensor& X = value(x);
  require_matrix(X, "gather_rows");
  std::size_t d = X.cols();
  Tensor C = Tensor::zeros({rows.size(), d});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int r = rows[i];
    if (r < 0 || std::size_t(r) >= X.rows())
      throw IndexOutOfRange("gather_rows: row index out of range");
    for (std::size_t j = 0; j < d; ++j) C.data[i * d + j] = X.data[r * d + j];
  }
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, rows, id](Tape& t) {
    const Tensor& g = t.grad(id);
    std::size_t d = t.value(x).cols();
    Tensor gx = Tensor::zeros(t.value(x).shape);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < d; ++j)
        gx.data[std::size_t(rows[i]) * d + j] += g.data[i * d + j];
    t.accumulate(x, gx);
  };
  return id;
}

Tape::NodeId Tape::scatter_rows(NodeId x, const std::vector<int>& rows,
                                std::size_t total_rows) {
  const Tensor& X = value(x);
  require_matrix(X, "scatter_rows");
  if (rows.size() != X.rows())
    throw ShapeMismatch("scatter_rows: one target row per input row");
  std::size_t d = X.cols();
  Tensor C = Tensor::zeros({total_rows, d});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int r = rows[i];
    if (r < 0 || std::size_t(r) >= total_rows)
      throw IndexOutOfRange("scatter_rows: row index out of range");
    for (std::size_t j = 0; j < d; ++j) C.data[std::size_t(r) * d + j] += X.data[i * d + j];
  }
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, rows, id](Tape& t) {
    const Tensor& g = t.grad(id);
    std::size_t d = t.value(x).cols();
    Tensor gx = Tensor::zeros(t.value(x).shape);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < d; ++j)
        gx.data[i * d + j] = g.data[std::size_t(rows[i]) * d + j];
    t.accumulate(x, gx);
  };
  return id;
}

Tape::NodeId Tape::segment_sum(NodeId x, const std::vector<int>& segment,
                               std::size_t num_segments) {
  const Tensor& X = value(x);
  require_matrix(X, "segment_sum");
  if (segment.size() != X.rows())
    throw ShapeMismatch("segment_sum: one segment id per row");
  std::size_t d = X.cols();
  Tensor C = Tensor::zeros({num_segments, d});
  for (std::size_t i = 0; i < segment.size(); ++i) {
    int s = segment[i];
    if (s < 0 || std::size_t(s) >= num_segments)
      throw IndexOutOfRange("segment_sum: segment id out of range");
    for (std::size_t j = 0; j < d; ++j)
      C.data[std::size_t(s) * d + j] += X.data[i * d + j];
  }
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, segment, id](Tape& t) {
    const Tensor& g = t.grad(id);
    std::size_t d = t.value(x).cols();
    Tensor gx = Tensor::zeros(t.value(x).shape);
    for (std::size_t i = 0; i < segment.size(); ++i)
      for (std::size_t j = 0; j < d; ++j)
        gx.data[i * d + j] = g.data[std::size_t(segment[i]) * d + j];
    t.accumulate(x, gx);
  };
  return id;
}

Tape::NodeId Tape::segment_mean(NodeId x, const std::vector<int>& segment,
                                std::size_t num_segments) {
  const Tensor& X = value(x);
  require_matrix(X, "segment_mean");
  if (segment.size() != X.rows())
    throw ShapeMismatch("segment_mean: one segment id per row");
  std::vector<std::size_t> counts(num_segments, 0);
  for (int s : segment) {
    if (s < 0 || std::size_t(s) >= num_segments)
      throw IndexOutOfRange("segment_mean: segment id out of range");
    counts[std::size_t(s)]++;
  }
  for (std::size_t s = 0; s < num_segments; ++s)
    if (counts[s] == 0) throw EmptySegment("segment_mean: empty segment");
  std::size_t d = X.cols();
  Tensor C = Tensor::zeros({num_segments, d});
  for (std::size_t i = 0; i < segment.size(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      C.data[std::size_t(segment[i]) * d + j] += X.data[i * d + j];
  for (std::size_t s = 0; s < num_segments; ++s)
    for (std::size_t j = 0; j < d; ++j) C.data[s * d + j] /= double(counts[s]);
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, segment, counts, id](Tape& t) {
    const Tensor& g = t.grad(id);
    std::size_t d = t.value(x).cols();
    Tensor gx = Tensor::zeros(t.value(x).shape);
    for (std::size_t i = 0; i < segment.size(); ++i) {
      std::size_t s = std::size_t(segment[i]);
      for (std::size_t j = 0; j < d; ++j)
        gx.data[i * d + j] = g.data[s * d + j] / double(counts[s]);
    }
    t.accumulate(x, gx);
  };
  return id;
}

Tape::NodeId Tape::segment_softmax(NodeId x, const std::vector<int>& segment,
                                   std::size_t num_segments) {
  const Tensor& X = value(x);
  require_matrix(X, "segment_softmax");
  if (X.cols() != 1) throw ShapeMismatch("segment_softmax: expects [E x 1]");
  if (segment.size() != X.rows())
    throw ShapeMismatch("segment_softmax: one segment id per row");
  std::vector<double> seg_max(num_segments, -1e300);
  for (std::size_t i = 0; i < segment.size(); ++i) {
    int s = segment[i];
    if (s < 0 || std::size_t(s) >= num_segments)
      throw IndexOutOfRange("segment_softmax: segment id out of range");
    seg_max[std::size_t(s)] = std::max(seg_max[std::size_t(s)], X.data[i]);
  }
  Tensor C = X;
  std::vector<double> seg_sum(num_segments, 0.0);
  for (std::size_t i = 0; i < segment.size(); ++i) {
    C.data[i] = std::exp(X.data[i] - seg_max[std::size_t(segment[i])]);
    seg_sum[std::size_t(segment[i])] += C.data[i];
  }
  for (std::size_t i = 0; i < segment.size(); ++i)
    C.data[i] /= seg_sum[std::size_t(segment[i])];
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, segment, num_segments, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& y = t.value(id);
    std::vector<double> dot(num_segments, 0.0);
    for (std::size_t i = 0; i < segment.size(); ++i)
      dot[std::size_t(segment[i])] += g.data[i] * y.data[i];
    Tensor gx = Tensor::zeros(t.value(x).shape);
    for (std::size_t i = 0; i < segment.size(); ++i)
      gx.data[i] = y.data[i] * (g.data[i] - dot[std::size_t(segment[i])]);
    t.accumulate(x, gx);
  };
  return id;
}

Tape::NodeId Tape::broadcast_cols(NodeId x, std::size_t d) {
  const Tensor& X = value(x);
  require_matrix(X, "broadcast_cols");
  if (X.cols() != 1) throw ShapeMismatch("broadcast_cols: expects [n x 1]");
  Tensor C = Tensor::zeros({X.rows(), d});
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j) C.data[i * d + j] = X.data[i];
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, d, id](Tape& t) {
    const Tensor& g = t.grad(id);
    std::size_t n = t.value(x).rows();
    Tensor gx = Tensor::zeros({n, 1});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) gx.data[i] += g.data[i * d + j];
    t.accumulate(x, gx);
  };
  return id;
}

Tape::NodeId Tape::layer_norm(NodeId x, NodeId gain, NodeId bias, double eps) {
  const Tensor& X = value(x);
  require_matrix(X, "layer_norm");
  std::size_t d = X.cols();
  const Tensor& G = value(gain);
  const Tensor& B = value(bias);
  if (G.shape != std::vector<std::size_t>{d} || B.shape != std::vector<std::size_t>{d})
    throw ShapeMismatch("layer_norm: gain/bias must be vectors of length d");
  std::size_t n = X.rows();
  Tensor xhat = Tensor::zeros({n, d});
  std::vector<double> inv_std(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mu = 0;
    for (std::size_t j = 0; j < d; ++j) mu += X.data[i * d + j];
    mu /= double(d);
    double var = 0;  // biased
    for (std::size_t j = 0; j < d; ++j) {
      double c = X.data[i * d + j] - mu;
      var += c * c;
    }
    var /= double(d);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j)
      xhat.data[i * d + j] = (X.data[i * d + j] - mu) * inv_std[i];
  }
  Tensor C = Tensor::zeros({n, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      C.data[i * d + j] = xhat.data[i * d + j] * G.data[j] + B.data[j];
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, gain, bias, xhat, inv_std, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& G2 = t.value(gain);
    std::size_t n = xhat.rows(), d = xhat.cols();
    Tensor gx = Tensor::zeros({n, d});
    Tensor gg = Tensor::zeros({d});
    Tensor gb = Tensor::zeros({d});
    for (std::size_t i = 0; i < n; ++i) {
      double m1 = 0, m2 = 0;  // mean(dxhat), mean(dxhat*xhat)
      for (std::size_t j = 0; j < d; ++j) {
        double dxh = g.data[i * d + j] * G2.data[j];
        m1 += dxh;
        m2 += dxh * xhat.data[i * d + j];
        gg.data[j] += g.data[i * d + j] * xhat.data[i * d + j];
        gb.data[j] += g.data[i * d + j];
      }
      m1 /= double(d);
      m2 /= double(d);
      for (std::size_t j = 0; j < d; ++j) {
        double dxh = g.data[i * d + j] * G2.data[j];
        gx.data[i * d + j] = inv_std[i] * (dxh - m1 - xhat.data[i * d + j] * m2);
      }
    }
    t.accumulate(x, gx);
    t.accumulate(gain, gg);
    t.accumulate(bias, gb);
  };
  return id;
}

Tape::NodeId Tape::dropout(NodeId x, double rate, std::mt19937_64& rng,
                           bool training) {
  if (rate < 0 || rate >= 1) throw BadInput("dropout: rate must be in [0,1)");
  if (!training || rate == 0.0) {
    Tensor C = value(x);
    NodeId id = push(std::move(C), nullptr);
    nodes_[id].back = [x, id](Tape& t) { t.accumulate(x, t.grad(id)); };
    return id;
  }
  const Tensor& X = value(x);
  double keep = 1.0 - rate;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> mask(X.data.size());
  for (double& m : mask) m = (u(rng) >= rate) ? 1.0 / keep : 0.0;
  Tensor C = X;
  for (std::size_t i = 0; i < C.data.size(); ++i) C.data[i] *= mask[i];
  NodeId id = push(std::move(C), nullptr);
  nodes_[id].back = [x, mask, id](Tape& t) {
    Tensor gx = t.grad(id);
    for (std::size_t i = 0; i < gx.data.size(); ++i) gx.data[i] *= mask[i];
    t.accumulate(x, gx);
  };
  return id;
}

void Tape::backward(NodeId loss) {
  if (!value(loss).is_scalar())
    throw NonScalarLoss("backward: loss must be a scalar");
  for (Node& n : nodes_) n.grad = Tensor{};
  nodes_[loss].grad = Tensor::full(value(loss).shape, 1.0);
  for (NodeId id = loss; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.back && !n.grad.data.empty()) n.back(*this);
  }
  // leaves that never received a gradient get explicit zeros
  for (Node& n : nodes_)
    if (n.grad.data.empty()) n.grad = Tensor::zeros(n.value.shape);
}

double check_gradients(const GraphBuilder& build,
                       const std::vector<Tensor>& params, double step) {
  // analytic pass
  Tape tape;
  std::vector<Tape::NodeId> ids;
  ids.reserve(params.size());
  for (const Tensor& p : params) ids.push_back(tape.leaf(p));
  Tape::NodeId loss = build(tape, ids);
  tape.backward(loss);

  auto eval = [&](const std::vector<Tensor>& ps) {
    Tape t2;
    std::vector<Tape::NodeId> id2;
    for (const Tensor& p : ps) id2.push_back(t2.leaf(p));
    return t2.value(build(t2, id2)).data[0];
  };

  double max_err = 0;
  std::vector<Tensor> work = params;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].data.size(); ++i) {
      double orig = work[p].data[i];
      work[p].data[i] = orig + step;
      double up = eval(work);
      work[p].data[i] = orig - step;
      double dn = eval(work);
      work[p].data[i] = orig;
      double fd = (up - dn) / (2 * step);
      double ad = tape.grad(ids[p]).data[i];
      double err = std::abs(ad - fd) / std::max(1e-8, std::abs(ad) + std::abs(fd));
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace dsd
