#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mulab/datasets.hpp"
#include "mulab/models.hpp"

namespace mulab {

// One evaluated run: accuracy metrics in percent, runtime in minutes.
struct MetricsRecord {
  double ua = 0, ra = 0, ta = 0, mia = 0;
  double rte = 0;
  std::string method;
  std::string policy;
  uint64_t seed = 0;
};

// Percents in [0,100], RTE >= 0; anything else -> InputError.
void validate_metrics(const MetricsRecord& rec);

enum class GapMode { per_seed, of_means };

std::string gap_mode_name(GapMode mode);
GapMode gap_mode_from_name(const std::string& name);

// Absolute per-metric differences against the retrain oracle, plus their mean.
struct GapRecord {
  double ua = 0, ra = 0, ta = 0, mia = 0;
  GapMode mode = GapMode::per_seed;
  double ag = 0;
};

struct CoreAccuracies {
  double ua = 0, ra = 0, ta = 0;
};

// UA = accuracy on the forget set, RA on the remain set, TA on the test set,
// all on clean images against true labels. Empty sets -> InputError.
CoreAccuracies core_accuracies(Model& m, const ForgetPartition& part,
                               const Dataset& train, const Dataset& test);

// Probability the model assigns to each sample's true label; softmax taken
// in double precision over the f32 logits.
std::vector<double> true_class_confidences(Model& m, const Dataset& data,
                                           std::span<const int32_t> indices,
                                           int batch_size = 256);

// Confidence-threshold membership attack: conf >= threshold flags a member.
struct MiaAttacker {
  double threshold = 0;
  // Balanced member/nonmember accuracy on the fit data, percent.
  double fit_accuracy = 0;
  int64_t n_members = 0;
  int64_t n_nonmembers = 0;
};

// Threshold maximizing balanced accuracy over the two confidence samples.
// Ties break toward the lower threshold. A single distinct confidence value
// across both sets -> FitError.
MiaAttacker fit_mia_threshold(std::span<const double> member_conf,
                              std::span<const double> nonmember_conf);

// Balanced attack fit: members are an equal-size subsample of the remain set,
// nonmembers of the test set, both drawn from seeded streams.
MiaAttacker fit_mia_attacker(Model& m, const ForgetPartition& part,
                             const Dataset& train, const Dataset& test,
                             uint64_t seed);

// Percent of confidences at or above the threshold.
double mia_flag_rate(std::span<const double> confidences, double threshold);

// Percent of forget samples the attacker flags as members.
double mia_score(Model& m, const ForgetPartition& part, const Dataset& train,
                 const MiaAttacker& attacker);

// Per-metric gap between unlearned runs and retrain runs. per_seed pairs runs
// by seed and averages |difference|; of_means takes |difference of means|.
GapRecord metric_gap(const std::vector<MetricsRecord>& unlearned,
                     const std::vector<MetricsRecord>& retrained,
                     GapMode mode);

// Mean of the four metric gaps.
double average_gap(const GapRecord& gaps);

}  // namespace mulab
