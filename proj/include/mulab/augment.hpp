#pragma once

#include <array>
#include <cstdint>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "mulab/rng.hpp"

namespace mulab {

// One CHW float image with pixels in [0,1]; the unit every transform
// operates on. Transforms mutate in place and preserve shape.
struct Image {
  int c = 0, h = 0, w = 0;
  std::vector<float> v;

  static Image from(std::span<const float> pixels, int c, int h, int w);
  float& at(int ch, int y, int x) {
    return v[(static_cast<size_t>(ch) * h + y) * w + x];
  }
  float at(int ch, int y, int x) const {
    return v[(static_cast<size_t>(ch) * h + y) * w + x];
  }
};

// The seven augmentation scenarios. Every scenario except no_aug starts with
// the default pair: random crop (pad 4) then horizontal flip (p 0.5).
enum class Scenario {
  no_aug,
  default_aug,
  default_rand_augment,
  default_auto_augment,
  default_random_erasing,
  default_trivial_aug,
  default_augmix,
};

const char* scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);
inline constexpr std::array<Scenario, 7> all_scenarios = {
    Scenario::no_aug,
    Scenario::default_aug,
    Scenario::default_rand_augment,
    Scenario::default_auto_augment,
    Scenario::default_random_erasing,
    Scenario::default_trivial_aug,
    Scenario::default_augmix,
};

// Op table shared by TrivialAugment, RandAugment and AugMix. Uniform draws
// cover the first kDrawOps entries; invert exists only for the AutoAugment
// policy table.
enum class TableOp {
  identity,
  rotate,
  shear_x,
  shear_y,
  translate_x,
  translate_y,
  brightness,
  contrast,
  color,
  sharpness,
  posterize,
  solarize,
  autocontrast,
  equalize,
  invert,
};
inline constexpr int kDrawOps = 14;

const char* table_op_name(TableOp op);

// Newline-delimited JSON debug log: one record per apply_policy call with
// the sample index, epoch, scenario, and the op list with drawn parameters.
struct TransformLog {
  std::vector<nlohmann::ordered_json> records;
  std::string dump() const;
};

// Deterministic kernels. Geometry ops resample nearest-neighbor with zero
// fill; color ops clip back into [0,1].
void crop_shifted(Image& im, int pad, int ox, int oy);
void flip_horizontal(Image& im);
void erase_rect(Image& im, int y0, int x0, int eh, int ew, float fill);
void rotate_nn(Image& im, double degrees);
void shear_x_nn(Image& im, double amount);
void shear_y_nn(Image& im, double amount);
void translate_x_nn(Image& im, int pixels);
void translate_y_nn(Image& im, int pixels);
void adjust_brightness(Image& im, double factor);
void adjust_contrast(Image& im, double factor);
void adjust_color(Image& im, double factor);
void adjust_sharpness(Image& im, double factor);
void posterize_bits(Image& im, int bits);
void solarize_threshold(Image& im, double threshold);
void autocontrast_image(Image& im);
void equalize_image(Image& im);
void invert_image(Image& im);

// Applies one table op at level in [0,1] (magnitude bin / 30). Signed ops
// (geometry and the four enhancement factors) use sign as the direction;
// the rest ignore it. Appends one entry to ops when given.
void apply_table_op(Image& im, TableOp op, double level, int sign,
                    nlohmann::ordered_json* ops = nullptr);

// Randomized wrappers. Each documents its draw order so seeded runs replay
// exactly.
void random_crop(Image& im, int pad, rng::Stream& s,
                 nlohmann::ordered_json* ops = nullptr);
void horizontal_flip(Image& im, double p, rng::Stream& s,
                     nlohmann::ordered_json* ops = nullptr);

struct EraseParams {
  double p = 0.5;
  double area_lo = 0.02, area_hi = 0.33;
  double aspect_lo = 0.3, aspect_hi = 3.3;
  float fill = 0.f;
  int attempts = 10;
};
void random_erase(Image& im, const EraseParams& params, rng::Stream& s,
                  nlohmann::ordered_json* ops = nullptr);

void trivial_augment(Image& im, rng::Stream& s,
                     nlohmann::ordered_json* ops = nullptr);
void rand_augment(Image& im, int n, int magnitude_bin, rng::Stream& s,
                  nlohmann::ordered_json* ops = nullptr);

struct AutoAugmentEntry {
  TableOp op;
  double p;
  int magnitude;  // 0..9, level = magnitude / 9
};
using AutoAugmentSubPolicy = std::array<AutoAugmentEntry, 2>;
// The published 25-sub-policy CIFAR-10 policy.
const std::vector<AutoAugmentSubPolicy>& cifar10_auto_augment();
void auto_augment(Image& im, const std::vector<AutoAugmentSubPolicy>& table,
                  rng::Stream& s, nlohmann::ordered_json* ops = nullptr);

struct AugMixParams {
  int chains = 3;
  int depth_lo = 1, depth_hi = 3;
  double alpha = 1.0;      // Dirichlet over chains and Beta mixing weight
  int magnitude_bin = 9;   // fixed chain op level = bin / 30
};
// output = m * original + (1 - m) * sum_i w_i * chain_i, accumulated in
// doubles then cast back.
Image augmix_blend(const Image& original, const std::vector<Image>& chains,
                   const std::vector<double>& weights, double m);
void augmix(Image& im, const AugMixParams& params, rng::Stream& s,
            nlohmann::ordered_json* ops = nullptr);

struct AugmentPolicy {
  Scenario scenario = Scenario::no_aug;
  int crop_pad = 4;
  double flip_p = 0.5;
  int ra_ops = 2;
  int ra_magnitude_bin = 9;
  EraseParams erase;
  AugMixParams mix;
};

// Pure function of (policy, image, sample index, epoch, seed): the stream is
// keyed by all three indices, so repeated calls are bit-identical and
// samples can be transformed in parallel.
void apply_policy(const AugmentPolicy& policy, Image& im, int64_t sample_index,
                  int64_t epoch, uint64_t seed, TransformLog* log = nullptr);

}  // namespace mulab
