#include "mulab/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "mulab/errors.hpp"

namespace mulab {

namespace {

constexpr double kPi = 3.14159265358979323846;

float clip01(double x) {
  return static_cast<float>(std::min(1.0, std::max(0.0, x)));
}

int quantize(float v) {
  const double c = std::min(1.0, std::max(0.0, static_cast<double>(v)));
  return static_cast<int>(std::lround(c * 255.0));
}

// Luma weights match the common ITU-R 601 grayscale; non-RGB images fall
// back to the channel mean.
double luma_at(const Image& im, int y, int x) {
  if (im.c == 3)
    return 0.299 * im.at(0, y, x) + 0.587 * im.at(1, y, x) +
           0.114 * im.at(2, y, x);
  double acc = 0.0;
  for (int ch = 0; ch < im.c; ++ch) acc += im.at(ch, y, x);
  return acc / im.c;
}

bool is_signed_op(TableOp op) {
  switch (op) {
    case TableOp::rotate:
    case TableOp::shear_x:
    case TableOp::shear_y:
    case TableOp::translate_x:
    case TableOp::translate_y:
    case TableOp::brightness:
    case TableOp::contrast:
    case TableOp::color:
    case TableOp::sharpness:
      return true;
    default:
      return false;
  }
}

// Every op application draws one sign even when the op ignores it, so the
// draw sequence shape does not depend on which op was drawn.
int draw_sign(rng::Stream& s) { return s.next_unit() < 0.5 ? -1 : 1; }

}  // namespace

Image Image::from(std::span<const float> pixels, int c, int h, int w) {
  if (static_cast<int64_t>(pixels.size()) != static_cast<int64_t>(c) * h * w)
    throw InputError("image pixel count does not match c*h*w");
  Image im;
  im.c = c;
  im.h = h;
  im.w = w;
  im.v.assign(pixels.begin(), pixels.end());
  return im;
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::no_aug: return "NoAug";
    case Scenario::default_aug: return "Default";
    case Scenario::default_rand_augment: return "Default+RandAugment";
    case Scenario::default_auto_augment: return "Default+AutoAugment";
    case Scenario::default_random_erasing: return "Default+RandomErasing";
    case Scenario::default_trivial_aug: return "Default+TrivialAug";
    case Scenario::default_augmix: return "Default+AugMix";
  }
  throw InputError("invalid scenario value");
}

Scenario scenario_from_name(const std::string& name) {
  for (Scenario s : all_scenarios)
    if (name == scenario_name(s)) return s;
  throw InputError("unknown augmentation scenario: " + name);
}

const char* table_op_name(TableOp op) {
  switch (op) {
    case TableOp::identity: return "identity";
    case TableOp::rotate: return "rotate";
    case TableOp::shear_x: return "shear-x";
    case TableOp::shear_y: return "shear-y";
    case TableOp::translate_x: return "translate-x";
    case TableOp::translate_y: return "translate-y";
    case TableOp::brightness: return "brightness";
    case TableOp::contrast: return "contrast";
    case TableOp::color: return "color";
    case TableOp::sharpness: return "sharpness";
    case TableOp::posterize: return "posterize";
    case TableOp::solarize: return "solarize";
    case TableOp::autocontrast: return "autocontrast";
    case TableOp::equalize: return "equalize";
    case TableOp::invert: return "invert";
  }
  throw InputError("invalid table op value");
}

std::string TransformLog::dump() const {
  std::string out;
  for (const auto& rec : records) {
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void crop_shifted(Image& im, int pad, int ox, int oy) {
  if (pad < 0) throw InputError("crop pad must be nonnegative");
  if (pad == 0) return;
  const std::vector<float> src = im.v;
  for (int ch = 0; ch < im.c; ++ch)
    for (int y = 0; y < im.h; ++y)
      for (int x = 0; x < im.w; ++x) {
        const int sy = y + oy - pad;
        const int sx = x + ox - pad;
        im.at(ch, y, x) =
            (sy >= 0 && sy < im.h && sx >= 0 && sx < im.w)
                ? src[(static_cast<size_t>(ch) * im.h + sy) * im.w + sx]
                : 0.f;
      }
}

void flip_horizontal(Image& im) {
  for (int ch = 0; ch < im.c; ++ch)
    for (int y = 0; y < im.h; ++y)
      for (int x = 0; x < im.w / 2; ++x)
        std::swap(im.at(ch, y, x), im.at(ch, y, im.w - 1 - x));
}

void erase_rect(Image& im, int y0, int x0, int eh, int ew, float fill) {
  for (int ch = 0; ch < im.c; ++ch)
    for (int y = y0; y < y0 + eh; ++y)
      for (int x = x0; x < x0 + ew; ++x) im.at(ch, y, x) = fill;
}

namespace {

// Shared nearest-neighbor resampler: for every output pixel, map() yields
// the source coordinates; out of bounds reads as zero.
template <class MapFn>
void resample_nn(Image& im, MapFn map) {
  const std::vector<float> src = im.v;
  for (int y = 0; y < im.h; ++y)
    for (int x = 0; x < im.w; ++x) {
      const auto [sx, sy] = map(x, y);
      const bool inside = sy >= 0 && sy < im.h && sx >= 0 && sx < im.w;
      for (int ch = 0; ch < im.c; ++ch)
        im.at(ch, y, x) =
            inside ? src[(static_cast<size_t>(ch) * im.h + sy) * im.w + sx]
                   : 0.f;
    }
}

}  // namespace

void rotate_nn(Image& im, double degrees) {
  if (degrees == 0.0) return;
  const double rad = degrees * kPi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const double cx = (im.w - 1) / 2.0, cy = (im.h - 1) / 2.0;
  resample_nn(im, [&](int x, int y) {
    const double dx = x - cx, dy = y - cy;
    const int sx = static_cast<int>(std::lround(cx + cs * dx + sn * dy));
    const int sy = static_cast<int>(std::lround(cy - sn * dx + cs * dy));
    return std::pair<int, int>(sx, sy);
  });
}

void shear_x_nn(Image& im, double amount) {
  if (amount == 0.0) return;
  const double cy = (im.h - 1) / 2.0;
  resample_nn(im, [&](int x, int y) {
    const int sx = static_cast<int>(std::lround(x + amount * (y - cy)));
    return std::pair<int, int>(sx, y);
  });
}

void shear_y_nn(Image& im, double amount) {
  if (amount == 0.0) return;
  const double cx = (im.w - 1) / 2.0;
  resample_nn(im, [&](int x, int y) {
    const int sy = static_cast<int>(std::lround(y + amount * (x - cx)));
    return std::pair<int, int>(x, sy);
  });
}

void translate_x_nn(Image& im, int pixels) {
  if (pixels == 0) return;
  resample_nn(im,
              [&](int x, int y) { return std::pair<int, int>(x - pixels, y); });
}

void translate_y_nn(Image& im, int pixels) {
  if (pixels == 0) return;
  resample_nn(im,
              [&](int x, int y) { return std::pair<int, int>(x, y - pixels); });
}

void adjust_brightness(Image& im, double factor) {
  for (auto& v : im.v) v = clip01(factor * v);
}

void adjust_contrast(Image& im, double factor) {
  double mean = 0.0;
  for (int y = 0; y < im.h; ++y)
    for (int x = 0; x < im.w; ++x) mean += luma_at(im, y, x);
  mean /= static_cast<double>(im.h) * im.w;
  for (auto& v : im.v) v = clip01(mean + factor * (v - mean));
}

void adjust_color(Image& im, double factor) {
  for (int y = 0; y < im.h; ++y)
    for (int x = 0; x < im.w; ++x) {
      const double l = luma_at(im, y, x);
      for (int ch = 0; ch < im.c; ++ch) {
        float& v = im.at(ch, y, x);
        v = clip01(l + factor * (v - l));
      }
    }
}

void adjust_sharpness(Image& im, double factor) {
  // 3x3 smoothing kernel (center 5, neighbors 1, /13) over interior pixels,
  // border kept as-is; the result is the blend anchor.
  const std::vector<float> src = im.v;
  std::vector<double> smooth(src.begin(), src.end());
  for (int ch = 0; ch < im.c; ++ch)
    for (int y = 1; y + 1 < im.h; ++y)
      for (int x = 1; x + 1 < im.w; ++x) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            acc += src[(static_cast<size_t>(ch) * im.h + y + dy) * im.w + x + dx] *
                   (dy == 0 && dx == 0 ? 5.0 : 1.0);
        smooth[(static_cast<size_t>(ch) * im.h + y) * im.w + x] = acc / 13.0;
      }
  for (size_t i = 0; i < im.v.size(); ++i)
    im.v[i] = clip01(smooth[i] + factor * (im.v[i] - smooth[i]));
}

void posterize_bits(Image& im, int bits) {
  if (bits < 1 || bits > 8) throw InputError("posterize bits must be in [1,8]");
  const int mask = (0xff << (8 - bits)) & 0xff;
  for (auto& v : im.v) v = static_cast<float>(quantize(v) & mask) / 255.f;
}

void solarize_threshold(Image& im, double threshold) {
  const float thr = static_cast<float>(threshold);
  for (auto& v : im.v)
    if (v >= thr) v = 1.f - v;
}

void autocontrast_image(Image& im) {
  const int hw = im.h * im.w;
  for (int ch = 0; ch < im.c; ++ch) {
    float* plane = im.v.data() + static_cast<size_t>(ch) * hw;
    int hist[256] = {};
    for (int i = 0; i < hw; ++i) ++hist[quantize(plane[i])];
    int lo = 0, hi = 255;
    while (lo < 256 && hist[lo] == 0) ++lo;
    while (hi >= 0 && hist[hi] == 0) --hi;
    if (hi <= lo) continue;
    const double scale = 255.0 / (hi - lo);
    const double offset = -lo * scale;
    int lut[256];
    for (int i = 0; i < 256; ++i) {
      // truncation toward zero, then clamp, matching the reference remap
      int t = static_cast<int>(i * scale + offset);
      lut[i] = std::min(255, std::max(0, t));
    }
    for (int i = 0; i < hw; ++i)
      plane[i] = static_cast<float>(lut[quantize(plane[i])]) / 255.f;
  }
}

void equalize_image(Image& im) {
  const int hw = im.h * im.w;
  for (int ch = 0; ch < im.c; ++ch) {
    float* plane = im.v.data() + static_cast<size_t>(ch) * hw;
    long long hist[256] = {};
    for (int i = 0; i < hw; ++i) ++hist[quantize(plane[i])];
    int nonzero = 0, last = -1;
    for (int i = 0; i < 256; ++i)
      if (hist[i] > 0) {
        ++nonzero;
        last = i;
      }
    if (nonzero <= 1) continue;
    // Classic histogram equalization lut: step is the pixel mass below the
    // top occupied bin spread over 255 levels; step 0 keeps the channel.
    const long long step = (static_cast<long long>(hw) - hist[last]) / 255;
    if (step == 0) continue;
    int lut[256];
    long long n = step / 2;
    for (int i = 0; i < 256; ++i) {
      lut[i] = static_cast<int>(std::min<long long>(255, n / step));
      n += hist[i];
    }
    for (int i = 0; i < hw; ++i)
      plane[i] = static_cast<float>(lut[quantize(plane[i])]) / 255.f;
  }
}

void invert_image(Image& im) {
  for (auto& v : im.v) v = 1.f - v;
}

void apply_table_op(Image& im, TableOp op, double level, int sign,
                    nlohmann::ordered_json* ops) {
  if (level < 0.0 || level > 1.0)
    throw InputError("table op level must be in [0,1]");
  switch (op) {
    case TableOp::identity:
      break;
    case TableOp::rotate:
      rotate_nn(im, sign * 30.0 * level);
      break;
    case TableOp::shear_x:
      shear_x_nn(im, sign * 0.3 * level);
      break;
    case TableOp::shear_y:
      shear_y_nn(im, sign * 0.3 * level);
      break;
    case TableOp::translate_x:
      translate_x_nn(im, sign * static_cast<int>(std::lround(10.0 * level)));
      break;
    case TableOp::translate_y:
      translate_y_nn(im, sign * static_cast<int>(std::lround(10.0 * level)));
      break;
    case TableOp::brightness:
      adjust_brightness(im, 1.0 + sign * 0.9 * level);
      break;
    case TableOp::contrast:
      adjust_contrast(im, 1.0 + sign * 0.9 * level);
      break;
    case TableOp::color:
      adjust_color(im, 1.0 + sign * 0.9 * level);
      break;
    case TableOp::sharpness:
      adjust_sharpness(im, 1.0 + sign * 0.9 * level);
      break;
    case TableOp::posterize:
      posterize_bits(im, 8 - static_cast<int>(std::lround(4.0 * level)));
      break;
    case TableOp::solarize:
      solarize_threshold(im, 1.0 - level);
      break;
    case TableOp::autocontrast:
      autocontrast_image(im);
      break;
    case TableOp::equalize:
      equalize_image(im);
      break;
    case TableOp::invert:
      invert_image(im);
      break;
  }
  if (ops)
    ops->push_back({{"op", table_op_name(op)}, {"level", level}, {"sign", sign}});
}

// Draw order: x offset, then y offset, each uniform over [0, 2*pad].
void random_crop(Image& im, int pad, rng::Stream& s,
                 nlohmann::ordered_json* ops) {
  if (pad < 0) throw InputError("crop pad must be nonnegative");
  int ox = 0, oy = 0;
  if (pad > 0) {
    ox = static_cast<int>(s.next_below(2 * static_cast<uint64_t>(pad) + 1));
    oy = static_cast<int>(s.next_below(2 * static_cast<uint64_t>(pad) + 1));
  }
  crop_shifted(im, pad, ox, oy);
  if (ops) ops->push_back({{"op", "crop"}, {"ox", ox}, {"oy", oy}});
}

void horizontal_flip(Image& im, double p, rng::Stream& s,
                     nlohmann::ordered_json* ops) {
  if (p < 0.0 || p > 1.0) throw InputError("flip probability must be in [0,1]");
  const bool applied = s.next_unit() < p;
  if (applied) flip_horizontal(im);
  if (ops) ops->push_back({{"op", "flip"}, {"applied", applied}});
}

// Draw order: gate, then per attempt the area fraction, the log-uniform
// aspect ratio, and on success the y and x origin. An attempt is valid only
// when the rounded rectangle fits and its pixel count stays inside the
// requested area band, so the erased-area contract holds exactly.
void random_erase(Image& im, const EraseParams& params, rng::Stream& s,
                  nlohmann::ordered_json* ops) {
  if (!(params.area_lo > 0.0 && params.area_lo <= params.area_hi &&
        params.area_hi < 1.0))
    throw InputError("erase area range must satisfy 0 < lo <= hi < 1");
  if (!(params.aspect_lo > 0.0 && params.aspect_lo <= params.aspect_hi))
    throw InputError("erase aspect range must satisfy 0 < lo <= hi");
  if (s.next_unit() >= params.p) {
    if (ops) ops->push_back({{"op", "erase"}, {"applied", false}});
    return;
  }
  const double hw = static_cast<double>(im.h) * im.w;
  for (int attempt = 0; attempt < params.attempts; ++attempt) {
    const double target = s.next_uniform(params.area_lo, params.area_hi) * hw;
    const double aspect = std::exp(
        s.next_uniform(std::log(params.aspect_lo), std::log(params.aspect_hi)));
    const int eh = static_cast<int>(std::lround(std::sqrt(target * aspect)));
    const int ew = static_cast<int>(std::lround(std::sqrt(target / aspect)));
    const double area = static_cast<double>(eh) * ew;
    if (eh < 1 || ew < 1 || eh > im.h || ew > im.w ||
        area < params.area_lo * hw || area > params.area_hi * hw)
      continue;
    const int y0 = static_cast<int>(s.next_below(im.h - eh + 1));
    const int x0 = static_cast<int>(s.next_below(im.w - ew + 1));
    erase_rect(im, y0, x0, eh, ew, params.fill);
    if (ops)
      ops->push_back({{"op", "erase"},
                      {"applied", true},
                      {"y", y0},
                      {"x", x0},
                      {"h", eh},
                      {"w", ew}});
    return;
  }
  if (ops) ops->push_back({{"op", "erase"}, {"applied", false}});
}

// Draw order: op index over the 14 draw ops, magnitude bin over [0,30], sign.
void trivial_augment(Image& im, rng::Stream& s, nlohmann::ordered_json* ops) {
  const auto op = static_cast<TableOp>(s.next_below(kDrawOps));
  const int bin = static_cast<int>(s.next_below(31));
  const int sign = draw_sign(s);
  apply_table_op(im, op, bin / 30.0, sign, ops);
}

// Draw order per op: op index, sign. Magnitude is fixed.
void rand_augment(Image& im, int n, int magnitude_bin, rng::Stream& s,
                  nlohmann::ordered_json* ops) {
  if (n < 1) throw InputError("rand_augment op count must be >= 1");
  if (magnitude_bin < 0 || magnitude_bin > 30)
    throw InputError("rand_augment magnitude bin must be in [0,30]");
  for (int i = 0; i < n; ++i) {
    const auto op = static_cast<TableOp>(s.next_below(kDrawOps));
    const int sign = draw_sign(s);
    apply_table_op(im, op, magnitude_bin / 30.0, sign, ops);
  }
}

const std::vector<AutoAugmentSubPolicy>& cifar10_auto_augment() {
  using Op = TableOp;
  static const std::vector<AutoAugmentSubPolicy> table = {
      {{{Op::invert, 0.1, 7}, {Op::contrast, 0.2, 6}}},
      {{{Op::rotate, 0.7, 2}, {Op::translate_x, 0.3, 9}}},
      {{{Op::sharpness, 0.8, 1}, {Op::sharpness, 0.9, 3}}},
      {{{Op::shear_y, 0.5, 8}, {Op::translate_y, 0.7, 9}}},
      {{{Op::autocontrast, 0.5, 8}, {Op::equalize, 0.9, 2}}},
      {{{Op::shear_y, 0.2, 7}, {Op::posterize, 0.3, 7}}},
      {{{Op::color, 0.4, 3}, {Op::brightness, 0.6, 7}}},
      {{{Op::sharpness, 0.3, 9}, {Op::brightness, 0.7, 9}}},
      {{{Op::equalize, 0.6, 5}, {Op::equalize, 0.5, 1}}},
      {{{Op::contrast, 0.6, 7}, {Op::sharpness, 0.6, 5}}},
      {{{Op::color, 0.7, 7}, {Op::translate_x, 0.5, 8}}},
      {{{Op::equalize, 0.3, 7}, {Op::autocontrast, 0.4, 8}}},
      {{{Op::translate_y, 0.4, 3}, {Op::sharpness, 0.2, 6}}},
      {{{Op::brightness, 0.9, 6}, {Op::color, 0.2, 8}}},
      {{{Op::solarize, 0.5, 2}, {Op::invert, 0.0, 3}}},
      {{{Op::equalize, 0.2, 0}, {Op::autocontrast, 0.6, 0}}},
      {{{Op::equalize, 0.2, 8}, {Op::equalize, 0.6, 4}}},
      {{{Op::color, 0.9, 9}, {Op::equalize, 0.6, 6}}},
      {{{Op::autocontrast, 0.8, 4}, {Op::solarize, 0.2, 8}}},
      {{{Op::brightness, 0.1, 3}, {Op::color, 0.7, 0}}},
      {{{Op::solarize, 0.4, 5}, {Op::autocontrast, 0.9, 3}}},
      {{{Op::translate_y, 0.9, 9}, {Op::translate_y, 0.7, 9}}},
      {{{Op::autocontrast, 0.9, 2}, {Op::solarize, 0.8, 3}}},
      {{{Op::equalize, 0.8, 8}, {Op::invert, 0.1, 3}}},
      {{{Op::translate_y, 0.7, 9}, {Op::autocontrast, 0.9, 1}}},
  };
  return table;
}

// Draw order: sub-policy index, then per entry a gate and, when it fires, a
// sign. Magnitudes are the policy's, on a 0..9 scale.
void auto_augment(Image& im, const std::vector<AutoAugmentSubPolicy>& table,
                  rng::Stream& s, nlohmann::ordered_json* ops) {
  if (table.empty()) throw InputError("auto_augment policy table is empty");
  const auto sub = static_cast<size_t>(s.next_below(table.size()));
  nlohmann::ordered_json gates = nlohmann::ordered_json::array();
  nlohmann::ordered_json applied = nlohmann::ordered_json::array();
  for (const AutoAugmentEntry& entry : table[sub]) {
    const double gate = s.next_unit();
    gates.push_back(gate);
    if (gate < entry.p) {
      const int sign = draw_sign(s);
      apply_table_op(im, entry.op, entry.magnitude / 9.0, sign, &applied);
    }
  }
  if (ops)
    ops->push_back({{"op", "auto-augment"},
                    {"sub_policy", sub},
                    {"gates", std::move(gates)},
                    {"applied", std::move(applied)}});
}

Image augmix_blend(const Image& original, const std::vector<Image>& chains,
                   const std::vector<double>& weights, double m) {
  if (chains.size() != weights.size())
    throw InputError("augmix chain and weight counts differ");
  Image out = original;
  for (size_t i = 0; i < out.v.size(); ++i) {
    double acc = 0.0;
    for (size_t k = 0; k < chains.size(); ++k)
      acc += weights[k] * chains[k].v[i];
    out.v[i] = clip01(m * original.v[i] + (1.0 - m) * acc);
  }
  return out;
}

// Draw order: Dirichlet chain weights, Beta mixing weight, then per chain a
// depth and per step an op index and sign. Chains branch from the incoming
// image; ops run at the fixed magnitude bin.
void augmix(Image& im, const AugMixParams& params, rng::Stream& s,
            nlohmann::ordered_json* ops) {
  if (params.chains < 1) throw InputError("augmix needs at least one chain");
  if (params.depth_lo < 1 || params.depth_hi < params.depth_lo)
    throw InputError("augmix depth range must satisfy 1 <= lo <= hi");
  const std::vector<double> w = s.next_dirichlet(params.alpha, params.chains);
  const double m = s.next_beta(params.alpha, params.alpha);
  const double level = params.magnitude_bin / 30.0;
  std::vector<Image> chains;
  chains.reserve(static_cast<size_t>(params.chains));
  nlohmann::ordered_json chain_log = nlohmann::ordered_json::array();
  for (int k = 0; k < params.chains; ++k) {
    Image chain = im;
    const int depth =
        params.depth_lo +
        static_cast<int>(s.next_below(params.depth_hi - params.depth_lo + 1));
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (int d = 0; d < depth; ++d) {
      const auto op = static_cast<TableOp>(s.next_below(kDrawOps));
      const int sign = draw_sign(s);
      apply_table_op(chain, op, level, sign, &steps);
    }
    chain_log.push_back(std::move(steps));
    chains.push_back(std::move(chain));
  }
  im = augmix_blend(im, chains, w, m);
  if (ops)
    ops->push_back({{"op", "augmix"},
                    {"m", m},
                    {"weights", w},
                    {"chains", std::move(chain_log)}});
}

void apply_policy(const AugmentPolicy& policy, Image& im, int64_t sample_index,
                  int64_t epoch, uint64_t seed, TransformLog* log) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  nlohmann::ordered_json* ops = log ? &entries : nullptr;
  if (policy.scenario != Scenario::no_aug) {
    rng::Stream s(rng::stream_key(seed, "augment",
                                  static_cast<uint64_t>(sample_index),
                                  static_cast<uint64_t>(epoch)));
    random_crop(im, policy.crop_pad, s, ops);
    horizontal_flip(im, policy.flip_p, s, ops);
    switch (policy.scenario) {
      case Scenario::no_aug:
      case Scenario::default_aug:
        break;
      case Scenario::default_rand_augment:
        rand_augment(im, policy.ra_ops, policy.ra_magnitude_bin, s, ops);
        break;
      case Scenario::default_auto_augment:
        auto_augment(im, cifar10_auto_augment(), s, ops);
        break;
      case Scenario::default_random_erasing:
        random_erase(im, policy.erase, s, ops);
        break;
      case Scenario::default_trivial_aug:
        trivial_augment(im, s, ops);
        break;
      case Scenario::default_augmix:
        augmix(im, policy.mix, s, ops);
        break;
    }
  }
  if (log)
    log->records.push_back({{"sample", sample_index},
                            {"epoch", epoch},
                            {"scenario", scenario_name(policy.scenario)},
                            {"ops", std::move(entries)}});
}

}  // namespace mulab
