#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mulab/augment.hpp"
#include "mulab/datasets.hpp"
#include "mulab/models.hpp"

namespace mulab {

// Hyperparameters shared by baseline training and every unlearning method.
// The seed drives initialization, epoch shuffles, and augmentation draws.
struct TrainConfig {
  int epochs = 10;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int batch_size = 64;
  AugmentPolicy policy;
  uint64_t seed = 1;
  // Random-label tuning runs on the relabeled forget set plus the remain set;
  // false restricts it to the relabeled forget set alone.
  bool relabel_include_remain = true;
  // Redraw the replacement labels at the start of every epoch instead of
  // once per run.
  bool relabel_per_epoch = false;
};

// epochs >= 0, lr > 0, batch size >= 1, momentum/weight decay finite and
// nonnegative; anything else -> InputError.
void validate_train_config(const TrainConfig& cfg);

// Per-parameter-tensor 0/1 masks aligned with Model::params() order.
struct SaliencyMask {
  std::vector<std::vector<uint8_t>> masks;
  double k = 0.0;
  int64_t selected() const;
};

// Optional observability for a training run.
struct TrainLog {
  // Per-sample mean loss of each epoch.
  std::vector<double> epoch_loss;
  // When true, every (epoch, dataset index) the loop feeds to the model is
  // appended to visits in visit order.
  bool record_visits = false;
  std::vector<std::pair<int, int32_t>> visits;
};

// Trains a fresh model on the full dataset. epochs=0 returns the
// initialization untouched.
Model train(const ArchSpec& arch, const Dataset& data, const TrainConfig& cfg,
            TrainLog* log = nullptr);

// Exact-unlearning oracle: fresh initialization from cfg.seed, trained on the
// remain set only. Never reads a forget sample.
Model retrain(const ArchSpec& arch, const Dataset& data,
              const ForgetPartition& part, const TrainConfig& cfg,
              TrainLog* log = nullptr);

// Continues training the origin model on the remain set only.
Model fine_tune(const Model& origin, const Dataset& data,
                const ForgetPartition& part, const TrainConfig& cfg,
                TrainLog* log = nullptr);

// Full-size copy of data.labels with every forget index relabeled to a
// uniformly drawn different class from the partition's "relabel" stream.
// Draw order is ascending forget index. K=1 -> InputError.
std::vector<int32_t> draw_random_labels(const Dataset& data,
                                        const ForgetPartition& part);
// Same, from the per-epoch substream; used when relabel_per_epoch is set.
std::vector<int32_t> draw_random_labels(const Dataset& data,
                                        const ForgetPartition& part, int epoch);

// Relabels the forget set, then continues training the origin model on the
// relabeled tuning set.
Model random_label(const Model& origin, const Dataset& data,
                   const ForgetPartition& part, const TrainConfig& cfg,
                   TrainLog* log = nullptr);

// Selects the ceil(k * P) parameters with the largest |grad| as a 0/1 mask.
// Ties at the threshold break toward the lower flat parameter index.
SaliencyMask mask_from_grads(const std::vector<std::vector<float>>& grads,
                             double k);

// Gradient magnitude of the forget-set loss at the current parameters:
// batches the forget set in ascending index order (clean images, true
// labels), sums the per-batch mean-loss gradients, and keeps the top
// ceil(k * P) entries. batch_cap limits the number of batches; 0 means all.
SaliencyMask compute_saliency_mask(Model& m, const Dataset& data,
                                   const ForgetPartition& part, double k,
                                   int batch_size = 64, int batch_cap = 0);

// Random-label tuning with the mask applied after every optimizer step:
// parameters outside the mask are pinned bit-exactly to the origin values.
Model salun(const Model& origin, const Dataset& data,
            const ForgetPartition& part, const SaliencyMask& mask,
            const TrainConfig& cfg, TrainLog* log = nullptr);

// Wall-clock minutes spent inside the call.
double measure_rte_minutes(const std::function<void()>& body);

}  // namespace mulab
