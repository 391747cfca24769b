#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mulab/datasets.hpp"
#include "mulab/graph.hpp"
#include "mulab/tensor.hpp"

namespace mulab {

struct ArchSpec {
  enum class Kind { tiny_resnet, mlp };
  Kind kind = Kind::tiny_resnet;
  int c = 3, h = 32, w = 32;
  int classes = 10;
  int width = 1;
};

void validate_arch(const ArchSpec& arch);
std::string arch_kind_name(ArchSpec::Kind kind);
ArchSpec::Kind arch_kind_from_name(const std::string& name);

// Closed-form parameter count for an architecture.
int64_t param_count(const ArchSpec& arch);

// Named parameter tensors in fixed order; the order defines gradient
// accumulation, serialization, and flat parameter indexing.
struct Model {
  ArchSpec arch;
  uint64_t seed = 0;
  std::vector<std::string> names;
  std::vector<Tensor> tensors;

  std::vector<Tensor*> params();
  int64_t total_params() const;
};

// Kaiming fan-in initialization from the model's own named stream;
// deterministic per (arch, seed).
Model build_model(const ArchSpec& arch, uint64_t seed);

// Records the architecture's forward pass on an already-added input node and
// returns the logits node. Used by training, inference, and saliency alike.
int model_forward(Graph& g, Model& m, int input_node);

// Logits for a batch; pure function of (parameters, batch).
Tensor predict(Model& m, const Tensor& batch);

// Percent of samples whose argmax logit equals the label; argmax ties break
// toward the lower class index.
double accuracy(Model& m, const Dataset& data, int batch_size = 256);
double accuracy_on(Model& m, const Dataset& data, std::span<const int32_t> indices,
                   int batch_size = 256);

void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace mulab
