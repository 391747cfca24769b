#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mulab/tensor.hpp"

namespace mulab {

// Image classification dataset, pixels in [0,1], row-major N x C x H x W.
struct Dataset {
  std::vector<float> images;
  std::vector<int32_t> labels;
  // CIFAR-100 coarse label bytes, kept only so fixtures round-trip; empty
  // otherwise.
  std::vector<uint8_t> coarse;
  int n = 0, c = 0, h = 0, w = 0, k = 0;
  std::string split;

  int64_t image_size() const { return static_cast<int64_t>(c) * h * w; }
  std::span<const float> image(int i) const {
    return {images.data() + static_cast<int64_t>(i) * image_size(),
            static_cast<size_t>(image_size())};
  }
};

enum class CifarVariant { cifar10, cifar100 };

// Reads the official binary batch layout from a directory: CIFAR-10 uses
// data_batch_1..5.bin + test_batch.bin, CIFAR-100 train.bin + test.bin.
std::pair<Dataset, Dataset> load_cifar(const std::string& dir, CifarVariant variant);

// Parses one binary file of records (1 or 2 label bytes + 3072 pixel bytes).
// Record count is the file size divided by the record length; a size that is
// not a whole number of records is a format error naming the file.
Dataset load_cifar_file(const std::string& file, CifarVariant variant,
                        const std::string& split);

// Re-serializes a dataset to the binary record layout; inverse of
// load_cifar_file for data loaded from it.
void write_cifar_file(const Dataset& data, const std::string& file,
                      CifarVariant variant);

// Class-conditional ring images: a per-class radial cosine pattern whose
// frequency encodes the class, plus per-sample Gaussian noise, clipped to
// [0,1]. Rings survive flips, rotations, and small crops, so augmentation
// keeps the label. A hard_fraction of samples instead carry a
// sample-specific ring from a reserved higher-frequency band; their label
// is recoverable only by memorizing the sample. Patterns depend only on
// (seed, class); train and test splits of the same seed share them;
// samples are keyed by (seed, split, index).
Dataset make_synthetic(int k, int per_class, int c, int h, int w, uint64_t seed,
                       const std::string& split, double noise_sigma = 0.25,
                       double contrast = 0.25, double hard_fraction = 0.0);

enum class ForgetMode { random, classwise };

// Disjoint cover of {0..N-1}: forget holds the unlearning request, remain the
// rest. Both sorted ascending.
struct ForgetPartition {
  std::vector<int32_t> forget;
  std::vector<int32_t> remain;
  ForgetMode mode = ForgetMode::random;
  double parameter = 0.0;
  uint64_t seed = 0;
};

// random mode: parameter is a rate in (0,1], |forget| = round(rate*N), drawn
// without replacement from the partition's own stream. classwise mode:
// parameter is a class id, forget = all samples with that label.
ForgetPartition split_forget(const Dataset& data, ForgetMode mode,
                             double parameter, uint64_t seed);

// Gathers indexed samples into a batch tensor plus labels, with an optional
// per-index label override.
std::pair<Tensor, std::vector<int32_t>> gather_batch(
    const Dataset& data, std::span<const int32_t> indices,
    const std::vector<int32_t>* label_override = nullptr);

}  // namespace mulab
