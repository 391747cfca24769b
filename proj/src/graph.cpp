#include "mulab/graph.hpp"

#include <utility>

#include "mulab/errors.hpp"

namespace mulab {

namespace K = kernels;

int Graph::check(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size()))
    throw UsageError("graph: node id out of range");
  return id;
}

int Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

const Tensor& Graph::value(int id) const { return nodes_[static_cast<size_t>(check(id))].out; }

const std::vector<float>& Graph::grad(int id) const {
  const Node& n = nodes_[static_cast<size_t>(check(id))];
  if (n.grad.size() != n.out.v.size())
    throw UsageError("graph: grad requested before backward");
  return n.grad;
}

int Graph::input(Tensor t) {
  Node n;
  n.kind = OpKind::Input;
  n.out = std::move(t);
  return push(std::move(n));
}

int Graph::param(Tensor& p) {
  if (p.v.empty()) throw UsageError("graph: param tensor has no values");
  Node n;
  n.kind = OpKind::Param;
  n.out = Tensor(p.shape, p.v);
  n.bound = &p;
  return push(std::move(n));
}

int Graph::conv2d(int x, int k, int stride, int pad) {
  const Tensor& xt = value(x);
  const Tensor& kt = value(k);
  if (xt.rank() != 4 || kt.rank() != 4)
    throw DimensionError("conv2d: input and kernel must be rank 4");
  Node n;
  n.kind = OpKind::Conv2d;
  n.a = x;
  n.b = k;
  n.dims = K::conv2d_dims(xt.dim(0), xt.dim(1), xt.dim(2), xt.dim(3), kt.dim(0),
                          kt.dim(1), kt.dim(2), kt.dim(3), stride, pad);
  n.out = Tensor::zeros({n.dims.n, n.dims.f, n.dims.oh, n.dims.ow});
  K::conv2d_forward(xt.v.data(), kt.v.data(), n.out.v.data(), n.dims);
  return push(std::move(n));
}

int Graph::dense(int x, int w, int b) {
  const Tensor& xt = value(x);
  const Tensor& wt = value(w);
  const Tensor& bt = value(b);
  if (xt.rank() != 2) throw DimensionError("dense: input must be rank 2");
  if (wt.rank() != 2 || bt.rank() != 1)
    throw DimensionError("dense: weight must be rank 2, bias rank 1");
  if (wt.dim(1) != xt.dim(1) || bt.dim(0) != wt.dim(0))
    throw DimensionError("dense: weight/bias dims do not match input");
  Node n;
  n.kind = OpKind::Dense;
  n.a = x;
  n.b = w;
  n.c = b;
  n.out = Tensor::zeros({xt.dim(0), wt.dim(0)});
  K::dense_forward(xt.v.data(), wt.v.data(), bt.v.data(), n.out.v.data(),
                   xt.dim(0), xt.dim(1), wt.dim(0));
  return push(std::move(n));
}

int Graph::relu(int x) {
  const Tensor& xt = value(x);
  Node n;
  n.kind = OpKind::Relu;
  n.a = x;
  n.out = Tensor::zeros(xt.shape);
  K::relu_forward(xt.v.data(), n.out.v.data(), xt.numel());
  return push(std::move(n));
}

int Graph::maxpool2(int x) {
  const Tensor& xt = value(x);
  if (xt.rank() != 4) throw DimensionError("maxpool2: input must be rank 4");
  if (xt.dim(2) < 2 || xt.dim(3) < 2)
    throw DimensionError("maxpool2: spatial dims must be at least 2");
  Node n;
  n.kind = OpKind::MaxPool2;
  n.a = x;
  n.out = Tensor::zeros({xt.dim(0), xt.dim(1), xt.dim(2) / 2, xt.dim(3) / 2});
  n.argmax.resize(n.out.v.size());
  K::maxpool2_forward(xt.v.data(), n.out.v.data(), n.argmax.data(), xt.dim(0),
                      xt.dim(1), xt.dim(2), xt.dim(3));
  return push(std::move(n));
}

int Graph::global_avg_pool(int x) {
  const Tensor& xt = value(x);
  if (xt.rank() != 4)
    throw DimensionError("global_avg_pool: input must be rank 4");
  Node n;
  n.kind = OpKind::GlobalAvgPool;
  n.a = x;
  n.out = Tensor::zeros({xt.dim(0), xt.dim(1)});
  K::global_avg_pool_forward(xt.v.data(), n.out.v.data(), xt.dim(0), xt.dim(1),
                             xt.dim(2), xt.dim(3));
  return push(std::move(n));
}

int Graph::add(int x, int y) {
  const Tensor& xt = value(x);
  const Tensor& yt = value(y);
  if (!same_shape(xt, yt)) throw DimensionError("add: shape mismatch");
  Node n;
  n.kind = OpKind::Add;
  n.a = x;
  n.b = y;
  n.out = Tensor::zeros(xt.shape);
  K::add_forward(xt.v.data(), yt.v.data(), n.out.v.data(), xt.numel());
  return push(std::move(n));
}

int Graph::flatten(int x) {
  const Tensor& xt = value(x);
  if (xt.rank() < 2) throw DimensionError("flatten: input must be rank >= 2");
  Node n;
  n.kind = OpKind::Flatten;
  n.a = x;
  n.out = Tensor({xt.dim(0), static_cast<int>(xt.numel() / xt.dim(0))}, xt.v);
  return push(std::move(n));
}

int Graph::scale(int x, float alpha) {
  const Tensor& xt = value(x);
  Node n;
  n.kind = OpKind::Scale;
  n.a = x;
  n.alpha = alpha;
  n.out = Tensor::zeros(xt.shape);
  for (size_t i = 0; i < xt.v.size(); ++i) n.out.v[i] = alpha * xt.v[i];
  return push(std::move(n));
}

int Graph::sum(int x) {
  const Tensor& xt = value(x);
  Node n;
  n.kind = OpKind::Sum;
  n.a = x;
  float total = 0.f;
  for (float v : xt.v) total += v;
  n.out = Tensor({1}, {total});
  return push(std::move(n));
}

int Graph::softmax_cross_entropy(int logits, std::vector<int32_t> labels) {
  const Tensor& lt = value(logits);
  if (lt.rank() != 2)
    throw DimensionError("softmax_cross_entropy: logits must be rank 2");
  const int nrows = lt.dim(0), k = lt.dim(1);
  if (static_cast<int>(labels.size()) != nrows)
    throw DimensionError("softmax_cross_entropy: one label per row required");
  for (int32_t l : labels)
    if (l < 0 || l >= k)
      throw InputError("softmax_cross_entropy: label out of range");
  Node n;
  n.kind = OpKind::SoftmaxCrossEntropy;
  n.a = logits;
  n.labels = std::move(labels);
  n.probs.resize(static_cast<size_t>(nrows) * k);
  float loss = 0.f;
  K::softmax_cross_entropy_forward(lt.v.data(), n.labels.data(), nrows, k,
                                   n.probs.data(), &loss);
  n.out = Tensor({1}, {loss});
  return push(std::move(n));
}

void Graph::backward(int loss) {
  check(loss);
  if (nodes_[static_cast<size_t>(loss)].out.numel() != 1)
    throw UsageError("backward: loss must be scalar");

  for (Node& n : nodes_) n.grad.assign(n.out.v.size(), 0.f);
  nodes_[static_cast<size_t>(loss)].grad[0] = 1.f;

  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    const float* dy = n.grad.data();
    switch (n.kind) {
      case OpKind::Input:
      case OpKind::Param:
        break;
      case OpKind::Conv2d: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        Node& k = nodes_[static_cast<size_t>(n.b)];
        K::conv2d_backward_input(dy, k.out.v.data(), x.grad.data(), n.dims);
        K::conv2d_backward_kernel(dy, x.out.v.data(), k.grad.data(), n.dims);
        break;
      }
      case OpKind::Dense: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        Node& w = nodes_[static_cast<size_t>(n.b)];
        Node& b = nodes_[static_cast<size_t>(n.c)];
        K::dense_backward(dy, x.out.v.data(), w.out.v.data(), x.grad.data(),
                          w.grad.data(), b.grad.data(), x.out.dim(0),
                          x.out.dim(1), w.out.dim(0));
        break;
      }
      case OpKind::Relu: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        K::relu_backward(x.out.v.data(), dy, x.grad.data(), x.out.numel());
        break;
      }
      case OpKind::MaxPool2: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        K::maxpool2_backward(dy, n.argmax.data(), x.grad.data(), x.out.dim(0),
                             x.out.dim(1), x.out.dim(2), x.out.dim(3));
        break;
      }
      case OpKind::GlobalAvgPool: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        K::global_avg_pool_backward(dy, x.grad.data(), x.out.dim(0),
                                    x.out.dim(1), x.out.dim(2), x.out.dim(3));
        break;
      }
      case OpKind::Add: {
        Node& xa = nodes_[static_cast<size_t>(n.a)];
        Node& xb = nodes_[static_cast<size_t>(n.b)];
        K::add_backward(dy, xa.grad.data(), xb.grad.data(), n.out.numel());
        break;
      }
      case OpKind::Flatten: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        for (size_t j = 0; j < n.grad.size(); ++j) x.grad[j] += n.grad[j];
        break;
      }
      case OpKind::Scale: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        for (size_t j = 0; j < n.grad.size(); ++j)
          x.grad[j] += n.alpha * n.grad[j];
        break;
      }
      case OpKind::Sum: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        for (float& g : x.grad) g += dy[0];
        break;
      }
      case OpKind::SoftmaxCrossEntropy: {
        Node& x = nodes_[static_cast<size_t>(n.a)];
        K::softmax_cross_entropy_backward(n.probs.data(), n.labels.data(),
                                          x.out.dim(0), x.out.dim(1), dy[0],
                                          x.grad.data());
        break;
      }
    }
  }

  for (Node& n : nodes_) {
    if (n.kind != OpKind::Param || n.bound == nullptr) continue;
    n.bound->ensure_grad();
    for (size_t j = 0; j < n.grad.size(); ++j) n.bound->g[j] += n.grad[j];
  }
}

}  // namespace mulab
