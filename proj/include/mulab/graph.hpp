#pragma once

#include <cstdint>
#include <vector>

#include "mulab/kernels.hpp"
#include "mulab/tensor.hpp"

namespace mulab {

enum class OpKind {
  Input,
  Param,
  Conv2d,
  Dense,
  Relu,
  MaxPool2,
  GlobalAvgPool,
  Add,
  Flatten,
  Scale,
  Sum,
  SoftmaxCrossEntropy,
};

// One recorded operation. `grad` holds d(loss)/d(out) after backward().
struct Node {
  OpKind kind;
  int a = -1, b = -1, c = -1;
  Tensor out;
  std::vector<float> grad;

  kernels::Conv2dDims dims{};
  std::vector<int32_t> argmax;
  std::vector<int32_t> labels;
  std::vector<float> probs;
  float alpha = 0.f;
  Tensor* bound = nullptr;
};

// Eager tape: every builder call runs the forward kernel immediately and
// records the node. backward() sweeps the tape in reverse creation order and
// accumulates parameter gradients into the bound tensors in creation order,
// so gradient accumulation order is fixed.
class Graph {
 public:
  int input(Tensor t);
  // Copies the parameter's current values and remembers the tensor; backward
  // accumulates into its grad buffer.
  int param(Tensor& p);

  int conv2d(int x, int k, int stride, int pad);
  int dense(int x, int w, int b);
  int relu(int x);
  int maxpool2(int x);
  int global_avg_pool(int x);
  int add(int x, int y);
  int flatten(int x);
  int scale(int x, float alpha);
  int sum(int x);
  int softmax_cross_entropy(int logits, std::vector<int32_t> labels);

  const Tensor& value(int id) const;
  // d(loss)/d(node); valid after backward().
  const std::vector<float>& grad(int id) const;
  const std::vector<Node>& nodes() const { return nodes_; }

  // loss must be a scalar node of this graph. Every Param node's bound tensor
  // receives its gradient (zero if the loss does not depend on it).
  void backward(int loss);

 private:
  int check(int id) const;
  int push(Node n);
  std::vector<Node> nodes_;
};

}  // namespace mulab
