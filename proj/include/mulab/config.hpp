#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mulab/datasets.hpp"
#include "mulab/eval.hpp"

namespace mulab {

struct DatasetSpec {
  std::string kind = "synthetic";
  std::string path = "data";
  int classes = 10;
  int per_class = 200;
  int channels = 3;
  int height = 10;
  int width = 10;
  double noise_sigma = 0.0;
  double contrast = 1.0;
  double hard_fraction = 0.2;
  uint64_t seed = 0;
};

// Epochs and SGD hyperparameters for one training phase.
struct PhaseConfig {
  int epochs = 10;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int batch_size = 64;
};

struct ForgetSpec {
  ForgetMode mode = ForgetMode::random;
  std::vector<double> parameters = {0.5};
};

// Declarative experiment grid: methods x policies x seeds x forget
// parameters, plus the shared baseline/unlearn hyperparameters.
struct ExperimentConfig {
  std::string name = "desk";
  DatasetSpec dataset;
  std::string arch_kind = "tiny-resnet";
  int arch_width = 2;
  PhaseConfig baseline{20, 0.02, 0.9, 5e-4, 16};
  PhaseConfig unlearn{5, 0.01, 0.9, 5e-4, 16};
  std::vector<std::string> methods = {"fine-tune", "random-label", "salun"};
  std::vector<std::string> policies = {"NoAug", "Default",
                                       "Default+TrivialAug"};
  ForgetSpec forget;
  std::vector<uint64_t> seeds = {1, 2, 3};
  std::string output_dir = "runs/desk";
  GapMode gap_mode = GapMode::per_seed;
  double salun_k = 0.5;
  int crop_pad = 1;
  bool eval_augmented = false;
};

const std::vector<std::string>& known_methods();

// Flat-key JSON with a versioned "schema" field. Unknown keys, wrong types,
// and invalid values all raise SchemaError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& flat);
ExperimentConfig load_config(const std::string& path);

// Canonical dump: every field emitted, keys sorted. parse(dump(c)) == c.
nlohmann::json dump_config(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// FNV-1a over the canonical dump; key-order permutations of the same config
// hash identically.
uint64_t config_hash(const ExperimentConfig& cfg);

void validate_config(const ExperimentConfig& cfg);

// desk | paper-cifar10 | paper-cifar100; unknown name -> InputError.
ExperimentConfig preset(const std::string& name);

}  // namespace mulab
