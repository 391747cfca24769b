#include "mulab/unlearn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "mulab/errors.hpp"
#include "mulab/graph.hpp"
#include "mulab/optim.hpp"
#include "mulab/rng.hpp"

namespace mulab {

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw InputError("epochs must be >= 0");
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr))
    throw InputError("learning rate must be > 0");
  if (!(cfg.momentum >= 0.0) || !std::isfinite(cfg.momentum))
    throw InputError("momentum must be finite and >= 0");
  if (!(cfg.weight_decay >= 0.0) || !std::isfinite(cfg.weight_decay))
    throw InputError("weight decay must be finite and >= 0");
  if (cfg.batch_size < 1) throw InputError("batch size must be >= 1");
}

int64_t SaliencyMask::selected() const {
  int64_t total = 0;
  for (const auto& m : masks)
    total += std::count(m.begin(), m.end(), uint8_t{1});
  return total;
}

namespace {

struct RunHooks {
  // Full-size per-dataset-index label override; null means dataset labels.
  const std::vector<int32_t>* labels = nullptr;
  // When set, called at each epoch start and overrides `labels` for the epoch.
  std::function<std::vector<int32_t>(int)> epoch_labels;
  const SaliencyMask* mask = nullptr;
  std::vector<std::vector<float>> origin;
  TrainLog* log = nullptr;
};

// Shared SGD loop for baseline training and every unlearning method. Each
// epoch reshuffles `order` from the per-epoch "shuffle" stream, augments each
// sample keyed by its dataset index, and steps after every batch. The mask
// hook pins unselected parameters back to `origin` after each step.
void run_training(Model& m, const Dataset& data,
                  const std::vector<int32_t>& order0, const TrainConfig& cfg,
                  RunHooks& hooks) {
  validate_train_config(cfg);
  if (order0.empty()) throw InputError("training index set is empty");
  for (int32_t idx : order0)
    if (idx < 0 || idx >= static_cast<int32_t>(data.n))
      throw InputError("training index " + std::to_string(idx) +
                       " out of range");

  const int64_t image_size = data.image_size();
  Sgd opt(static_cast<float>(cfg.lr), static_cast<float>(cfg.momentum),
          static_cast<float>(cfg.weight_decay));
  auto params = m.params();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<int32_t> labels_epoch;
    const std::vector<int32_t>* labels = hooks.labels;
    if (hooks.epoch_labels) {
      labels_epoch = hooks.epoch_labels(epoch);
      labels = &labels_epoch;
    }

    std::vector<int32_t> order = order0;
    rng::Stream shuffle(rng::stream_key(cfg.seed, "shuffle",
                              static_cast<uint64_t>(epoch)));
    shuffle.shuffle(order);

    double loss_sum = 0.0;
    const size_t n = order.size();
    int batch_index = 0;
    for (size_t b0 = 0; b0 < n; b0 += static_cast<size_t>(cfg.batch_size),
                ++batch_index) {
      const size_t bn =
          std::min(static_cast<size_t>(cfg.batch_size), n - b0);
      Tensor batch = Tensor::zeros(
          {static_cast<int>(bn), data.c, data.h, data.w});
      std::vector<int32_t> batch_labels(bn);
      for (size_t i = 0; i < bn; ++i) {
        const int32_t idx = order[b0 + i];
        Image im = Image::from(data.image(idx), data.c, data.h, data.w);
        apply_policy(cfg.policy, im, idx, epoch, cfg.seed);
        std::copy(im.v.begin(), im.v.end(),
                  batch.v.begin() + static_cast<int64_t>(i) * image_size);
        batch_labels[i] = labels ? (*labels)[static_cast<size_t>(idx)]
                                 : data.labels[static_cast<size_t>(idx)];
        if (hooks.log && hooks.log->record_visits)
          hooks.log->visits.emplace_back(epoch, idx);
      }

      Graph g;
      const int input = g.input(std::move(batch));
      const int logits = model_forward(g, m, input);
      const int loss = g.softmax_cross_entropy(logits, batch_labels);
      const float loss_value = g.value(loss).v[0];
      if (!std::isfinite(loss_value))
        throw TrainingError("training loss is not finite", epoch, batch_index);
      g.backward(loss);
      opt.step(params);
      if (hooks.mask)
        opt.reset_unselected(params, hooks.mask->masks, hooks.origin);
      loss_sum += static_cast<double>(loss_value) * static_cast<double>(bn);
    }
    if (hooks.log)
      hooks.log->epoch_loss.push_back(loss_sum / static_cast<double>(n));
  }
}

std::vector<int32_t> all_indices(const Dataset& data) {
  std::vector<int32_t> idx(static_cast<size_t>(data.n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::vector<int32_t> relabel_with(const Dataset& data,
                                  const ForgetPartition& part,
                                  rng::Stream& stream) {
  if (data.k < 2)
    throw InputError("random relabeling needs at least two classes");
  std::vector<int32_t> labels = data.labels;
  for (int32_t idx : part.forget) {
    const int32_t y = labels[static_cast<size_t>(idx)];
    const int32_t r =
        static_cast<int32_t>(stream.next_below(static_cast<uint64_t>(data.k - 1)));
    labels[static_cast<size_t>(idx)] = r < y ? r : r + 1;
  }
  return labels;
}

std::vector<float> flat_abs(const std::vector<std::vector<float>>& grads) {
  std::vector<float> flat;
  for (const auto& g : grads) flat.insert(flat.end(), g.begin(), g.end());
  for (float& v : flat) v = std::fabs(v);
  return flat;
}

void check_mask_shape(const Model& m, const SaliencyMask& mask) {
  if (mask.masks.size() != m.tensors.size())
    throw DimensionError("saliency mask tensor count does not match model");
  for (size_t t = 0; t < mask.masks.size(); ++t)
    if (static_cast<int64_t>(mask.masks[t].size()) != m.tensors[t].numel())
      throw DimensionError("saliency mask size mismatch for " + m.names[t]);
}

Model relabel_tune(const Model& origin, const Dataset& data,
                   const ForgetPartition& part, const TrainConfig& cfg,
                   const SaliencyMask* mask, TrainLog* log) {
  if (part.forget.empty()) throw InputError("forget set is empty");

  std::vector<int32_t> order;
  if (cfg.relabel_include_remain) {
    order.resize(part.forget.size() + part.remain.size());
    std::merge(part.forget.begin(), part.forget.end(), part.remain.begin(),
               part.remain.end(), order.begin());
  } else {
    order = part.forget;
  }

  Model m = origin;
  RunHooks hooks;
  hooks.log = log;
  std::vector<int32_t> fixed_labels;
  if (cfg.relabel_per_epoch) {
    hooks.epoch_labels = [&data, &part](int epoch) {
      return draw_random_labels(data, part, epoch);
    };
  } else {
    fixed_labels = draw_random_labels(data, part);
    hooks.labels = &fixed_labels;
  }
  if (mask) {
    check_mask_shape(m, *mask);
    hooks.mask = mask;
    hooks.origin.reserve(m.tensors.size());
    for (const Tensor& t : origin.tensors) hooks.origin.push_back(t.v);
  }
  run_training(m, data, order, cfg, hooks);
  return m;
}

}  // namespace

Model train(const ArchSpec& arch, const Dataset& data, const TrainConfig& cfg,
            TrainLog* log) {
  validate_train_config(cfg);
  if (data.n <= 0) throw InputError("dataset is empty");
  Model m = build_model(arch, cfg.seed);
  if (cfg.epochs == 0) return m;
  RunHooks hooks;
  hooks.log = log;
  run_training(m, data, all_indices(data), cfg, hooks);
  return m;
}

Model retrain(const ArchSpec& arch, const Dataset& data,
              const ForgetPartition& part, const TrainConfig& cfg,
              TrainLog* log) {
  validate_train_config(cfg);
  if (part.remain.empty()) throw InputError("remain set is empty");
  Model m = build_model(arch, cfg.seed);
  if (cfg.epochs == 0) return m;
  RunHooks hooks;
  hooks.log = log;
  run_training(m, data, part.remain, cfg, hooks);
  return m;
}

Model fine_tune(const Model& origin, const Dataset& data,
                const ForgetPartition& part, const TrainConfig& cfg,
                TrainLog* log) {
  validate_train_config(cfg);
  if (part.remain.empty()) throw InputError("remain set is empty");
  Model m = origin;
  if (cfg.epochs == 0) return m;
  RunHooks hooks;
  hooks.log = log;
  run_training(m, data, part.remain, cfg, hooks);
  return m;
}

std::vector<int32_t> draw_random_labels(const Dataset& data,
                                        const ForgetPartition& part) {
  rng::Stream stream(rng::stream_key(part.seed, "relabel"));
  return relabel_with(data, part, stream);
}

std::vector<int32_t> draw_random_labels(const Dataset& data,
                                        const ForgetPartition& part,
                                        int epoch) {
  rng::Stream stream(
      rng::stream_key(part.seed, "relabel", static_cast<uint64_t>(epoch)));
  return relabel_with(data, part, stream);
}

Model random_label(const Model& origin, const Dataset& data,
                   const ForgetPartition& part, const TrainConfig& cfg,
                   TrainLog* log) {
  validate_train_config(cfg);
  return relabel_tune(origin, data, part, cfg, nullptr, log);
}

SaliencyMask mask_from_grads(const std::vector<std::vector<float>>& grads,
                             double k) {
  if (!(k > 0.0) || k > 1.0)
    throw InputError("saliency fraction must be in (0, 1]");
  std::vector<float> flat = flat_abs(grads);
  const int64_t total = static_cast<int64_t>(flat.size());
  if (total == 0) throw InputError("saliency gradients are empty");

  const int64_t keep =
      static_cast<int64_t>(std::ceil(k * static_cast<double>(total)));
  std::vector<int64_t> order(flat.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&flat](int64_t a, int64_t b) {
    const float fa = flat[static_cast<size_t>(a)];
    const float fb = flat[static_cast<size_t>(b)];
    if (fa != fb) return fa > fb;
    return a < b;
  });

  std::vector<uint8_t> selected(flat.size(), 0);
  for (int64_t i = 0; i < keep; ++i)
    selected[static_cast<size_t>(order[static_cast<size_t>(i)])] = 1;

  SaliencyMask mask;
  mask.k = k;
  mask.masks.reserve(grads.size());
  size_t offset = 0;
  for (const auto& g : grads) {
    mask.masks.emplace_back(selected.begin() + static_cast<int64_t>(offset),
                            selected.begin() +
                                static_cast<int64_t>(offset + g.size()));
    offset += g.size();
  }
  return mask;
}

SaliencyMask compute_saliency_mask(Model& m, const Dataset& data,
                                   const ForgetPartition& part, double k,
                                   int batch_size, int batch_cap) {
  if (!(k > 0.0) || k > 1.0)
    throw InputError("saliency fraction must be in (0, 1]");
  if (part.forget.empty()) throw InputError("forget set is empty");
  if (batch_size < 1) throw InputError("batch size must be >= 1");
  if (batch_cap < 0) throw InputError("batch cap must be >= 0");

  auto params = m.params();
  for (Tensor* p : params) p->clear_grad();

  // backward() adds into the persistent grad buffers, so looping batches
  // without clearing accumulates the sum of per-batch mean-loss gradients.
  const size_t nf = part.forget.size();
  int batches = 0;
  for (size_t b0 = 0; b0 < nf; b0 += static_cast<size_t>(batch_size)) {
    if (batch_cap > 0 && batches == batch_cap) break;
    const size_t bn = std::min(static_cast<size_t>(batch_size), nf - b0);
    auto [batch, labels] = gather_batch(
        data, std::span<const int32_t>(part.forget.data() + b0, bn));
    Graph g;
    const int input = g.input(std::move(batch));
    const int logits = model_forward(g, m, input);
    const int loss = g.softmax_cross_entropy(logits, std::move(labels));
    g.backward(loss);
    ++batches;
  }

  std::vector<std::vector<float>> grads;
  grads.reserve(params.size());
  for (Tensor* p : params) {
    if (p->has_grad())
      grads.push_back(p->g);
    else
      grads.emplace_back(static_cast<size_t>(p->numel()), 0.f);
    p->clear_grad();
  }
  return mask_from_grads(grads, k);
}

Model salun(const Model& origin, const Dataset& data,
            const ForgetPartition& part, const SaliencyMask& mask,
            const TrainConfig& cfg, TrainLog* log) {
  validate_train_config(cfg);
  return relabel_tune(origin, data, part, cfg, &mask, log);
}

double measure_rte_minutes(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  const auto stop = std::chrono::steady_clock::now();
  const double seconds =
      std::chrono::duration<double>(stop - start).count();
  return seconds / 60.0;
}

}  // namespace mulab
