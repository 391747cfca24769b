#include "mulab/models.hpp"

#include <cmath>
#include <numeric>

#include "mulab/errors.hpp"
#include "mulab/rng.hpp"
#include "mulab/serialize.hpp"

namespace mulab {

namespace {

// Parameter layout per architecture. tiny-resnet: 3x3 stem, one
// same-width residual block, one widening residual block with a 1x1
// projection skip, each block followed by 2x2 pooling, then GAP and a dense
// head. Convolutions carry no bias.
struct LayerDef {
  std::string name;
  std::vector<int> shape;
  int fan_in;
};

std::vector<LayerDef> layer_defs(const ArchSpec& a) {
  const int w8 = 8 * a.width, w16 = 16 * a.width;
  if (a.kind == ArchSpec::Kind::tiny_resnet) {
    return {
        {"stem.k", {w8, a.c, 3, 3}, a.c * 9},
        {"a1.k", {w8, w8, 3, 3}, w8 * 9},
        {"a2.k", {w8, w8, 3, 3}, w8 * 9},
        {"b1.k", {w16, w8, 3, 3}, w8 * 9},
        {"b2.k", {w16, w16, 3, 3}, w16 * 9},
        {"bskip.k", {w16, w8, 1, 1}, w8},
        {"fc.w", {a.classes, w16}, w16},
        {"fc.b", {a.classes}, 0},
    };
  }
  const int in = a.c * a.h * a.w;
  return {
      {"fc1.w", {w16, in}, in},
      {"fc1.b", {w16}, 0},
      {"fc2.w", {a.classes, w16}, w16},
      {"fc2.b", {a.classes}, 0},
  };
}

}  // namespace

void validate_arch(const ArchSpec& arch) {
  if (arch.classes < 2) throw InputError("arch: need at least 2 classes");
  if (arch.c < 1 || arch.h < 1 || arch.w < 1)
    throw InputError("arch: input dims must be positive");
  if (arch.width < 1) throw InputError("arch: width multiplier must be >= 1");
  if (arch.kind == ArchSpec::Kind::tiny_resnet && (arch.h < 4 || arch.w < 4))
    throw InputError("arch: tiny-resnet needs at least 4x4 input for two poolings");
}

std::string arch_kind_name(ArchSpec::Kind kind) {
  return kind == ArchSpec::Kind::tiny_resnet ? "tiny-resnet" : "mlp";
}

ArchSpec::Kind arch_kind_from_name(const std::string& name) {
  if (name == "tiny-resnet") return ArchSpec::Kind::tiny_resnet;
  if (name == "mlp") return ArchSpec::Kind::mlp;
  throw InputError("unknown architecture: " + name);
}

int64_t param_count(const ArchSpec& arch) {
  validate_arch(arch);
  int64_t total = 0;
  for (const auto& def : layer_defs(arch)) total += shape_numel(def.shape);
  return total;
}

std::vector<Tensor*> Model::params() {
  std::vector<Tensor*> p;
  p.reserve(tensors.size());
  for (auto& t : tensors) p.push_back(&t);
  return p;
}

int64_t Model::total_params() const {
  int64_t total = 0;
  for (const auto& t : tensors) total += t.numel();
  return total;
}

Model build_model(const ArchSpec& arch, uint64_t seed) {
  validate_arch(arch);
  Model m;
  m.arch = arch;
  m.seed = seed;
  rng::Stream s(rng::stream_key(seed, "init"));
  for (const auto& def : layer_defs(arch)) {
    Tensor t = Tensor::zeros(def.shape);
    if (def.fan_in > 0) {
      const double std = std::sqrt(2.0 / def.fan_in);
      for (auto& v : t.v) v = static_cast<float>(std * s.next_gaussian());
    }
    m.names.push_back(def.name);
    m.tensors.push_back(std::move(t));
  }
  return m;
}

int model_forward(Graph& g, Model& m, int input_node) {
  const Tensor& in = g.value(input_node);
  if (in.rank() != 4 || in.dim(1) != m.arch.c || in.dim(2) != m.arch.h ||
      in.dim(3) != m.arch.w)
    throw DimensionError("model_forward: batch shape does not match arch");

  auto p = [&](int i) { return g.param(m.tensors[static_cast<size_t>(i)]); };

  if (m.arch.kind == ArchSpec::Kind::mlp) {
    const int flat = g.flatten(input_node);
    const int h = g.relu(g.dense(flat, p(0), p(1)));
    return g.dense(h, p(2), p(3));
  }

  const int stem = g.relu(g.conv2d(input_node, p(0), 1, 1));
  const int a1 = g.relu(g.conv2d(stem, p(1), 1, 1));
  const int a2 = g.conv2d(a1, p(2), 1, 1);
  const int block_a = g.maxpool2(g.relu(g.add(a2, stem)));
  const int b1 = g.relu(g.conv2d(block_a, p(3), 1, 1));
  const int b2 = g.conv2d(b1, p(4), 1, 1);
  const int skip = g.conv2d(block_a, p(5), 1, 0);
  const int block_b = g.maxpool2(g.relu(g.add(b2, skip)));
  const int pooled = g.global_avg_pool(block_b);
  return g.dense(pooled, p(6), p(7));
}

Tensor predict(Model& m, const Tensor& batch) {
  Graph g;
  const int logits = model_forward(g, m, g.input(batch));
  return g.value(logits);
}

namespace {

double accuracy_impl(Model& m, const Dataset& data,
                     std::span<const int32_t> indices, int batch_size) {
  if (indices.empty()) throw InputError("accuracy: empty evaluation set");
  if (batch_size < 1) throw InputError("accuracy: batch size must be >= 1");
  int64_t correct = 0;
  for (size_t start = 0; start < indices.size(); start += static_cast<size_t>(batch_size)) {
    const size_t stop = std::min(indices.size(), start + static_cast<size_t>(batch_size));
    auto [batch, labels] = gather_batch(data, indices.subspan(start, stop - start));
    const Tensor logits = predict(m, batch);
    const int k = logits.dim(1);
    for (int r = 0; r < logits.dim(0); ++r) {
      const float* row = logits.v.data() + static_cast<int64_t>(r) * k;
      int best = 0;
      for (int j = 1; j < k; ++j)
        if (row[j] > row[best]) best = j;
      if (best == labels[static_cast<size_t>(r)]) ++correct;
    }
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace

double accuracy_on(Model& m, const Dataset& data, std::span<const int32_t> indices,
                   int batch_size) {
  return accuracy_impl(m, data, indices, batch_size);
}

double accuracy(Model& m, const Dataset& data, int batch_size) {
  if (data.n <= 0) throw InputError("accuracy: empty dataset");
  std::vector<int32_t> all(static_cast<size_t>(data.n));
  std::iota(all.begin(), all.end(), 0);
  return accuracy_impl(m, data, all, batch_size);
}

void save_model(const Model& m, const std::string& path) {
  nlohmann::ordered_json meta;
  meta["arch"] = {{"kind", arch_kind_name(m.arch.kind)}, {"c", m.arch.c},
                  {"h", m.arch.h},                       {"w", m.arch.w},
                  {"classes", m.arch.classes},           {"width", m.arch.width}};
  meta["seed"] = m.seed;
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (size_t i = 0; i < m.tensors.size(); ++i)
    tensors.emplace_back(m.names[i], &m.tensors[i]);
  save_checkpoint(path, tensors, meta);
}

Model load_model(const std::string& path) {
  Checkpoint cp = load_checkpoint(path);
  Model m;
  try {
    const auto& a = cp.meta.at("arch");
    m.arch.kind = arch_kind_from_name(a.at("kind").get<std::string>());
    m.arch.c = a.at("c").get<int>();
    m.arch.h = a.at("h").get<int>();
    m.arch.w = a.at("w").get<int>();
    m.arch.classes = a.at("classes").get<int>();
    m.arch.width = a.at("width").get<int>();
    m.seed = cp.meta.at("seed").get<uint64_t>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError("model checkpoint missing arch metadata: " + path);
  }
  validate_arch(m.arch);

  const Model fresh = build_model(m.arch, m.seed);
  if (cp.tensors.size() != fresh.tensors.size())
    throw FormatError("model checkpoint tensor count mismatch: " + path);
  for (size_t i = 0; i < cp.tensors.size(); ++i) {
    if (cp.tensors[i].first != fresh.names[i] ||
        cp.tensors[i].second.shape != fresh.tensors[i].shape)
      throw FormatError("model checkpoint layout mismatch at '" +
                        cp.tensors[i].first + "': " + path);
    m.names.push_back(cp.tensors[i].first);
    m.tensors.push_back(std::move(cp.tensors[i].second));
  }
  return m;
}

}  // namespace mulab
