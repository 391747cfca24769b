#include "mulab/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>

#include "mulab/errors.hpp"
#include "mulab/rng.hpp"

namespace mulab {

namespace {

constexpr int kCifarPixels = 3 * 32 * 32;
constexpr double kPi = 3.14159265358979323846;

int label_bytes(CifarVariant v) { return v == CifarVariant::cifar10 ? 1 : 2; }
int class_count(CifarVariant v) { return v == CifarVariant::cifar10 ? 10 : 100; }

std::vector<uint8_t> read_all(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset file: " + file);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

Dataset load_cifar_file(const std::string& file, CifarVariant variant,
                        const std::string& split) {
  const auto bytes = read_all(file);
  const size_t record_len = static_cast<size_t>(label_bytes(variant)) + kCifarPixels;
  if (bytes.empty() || bytes.size() % record_len != 0)
    throw FormatError("wrong record length in dataset file: " + file);

  Dataset d;
  d.n = static_cast<int>(bytes.size() / record_len);
  d.c = 3;
  d.h = 32;
  d.w = 32;
  d.k = class_count(variant);
  d.split = split;
  d.images.resize(static_cast<size_t>(d.n) * kCifarPixels);
  d.labels.resize(static_cast<size_t>(d.n));
  if (variant == CifarVariant::cifar100) d.coarse.resize(static_cast<size_t>(d.n));

  for (int i = 0; i < d.n; ++i) {
    const uint8_t* rec = bytes.data() + static_cast<size_t>(i) * record_len;
    int fine;
    if (variant == CifarVariant::cifar10) {
      fine = rec[0];
    } else {
      d.coarse[static_cast<size_t>(i)] = rec[0];
      fine = rec[1];
    }
    if (fine >= d.k) throw FormatError("label out of range in dataset file: " + file);
    d.labels[static_cast<size_t>(i)] = fine;
    const uint8_t* px = rec + label_bytes(variant);
    float* dst = d.images.data() + static_cast<size_t>(i) * kCifarPixels;
    for (int j = 0; j < kCifarPixels; ++j) dst[j] = static_cast<float>(px[j]) / 255.f;
  }
  return d;
}

void write_cifar_file(const Dataset& data, const std::string& file,
                      CifarVariant variant) {
  if (data.c != 3 || data.h != 32 || data.w != 32)
    throw InputError("write_cifar_file: data is not 3x32x32");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset file: " + file);
  for (int i = 0; i < data.n; ++i) {
    if (variant == CifarVariant::cifar100) {
      const uint8_t coarse =
          data.coarse.empty() ? 0 : data.coarse[static_cast<size_t>(i)];
      out.put(static_cast<char>(coarse));
    }
    out.put(static_cast<char>(data.labels[static_cast<size_t>(i)]));
    const float* px = data.images.data() + static_cast<size_t>(i) * kCifarPixels;
    for (int j = 0; j < kCifarPixels; ++j) {
      const long v = std::lround(static_cast<double>(px[j]) * 255.0);
      out.put(static_cast<char>(std::clamp(v, 0l, 255l)));
    }
  }
  if (!out) throw IoError("short write on dataset file: " + file);
}

std::pair<Dataset, Dataset> load_cifar(const std::string& dir, CifarVariant variant) {
  namespace fs = std::filesystem;
  auto join = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

  if (variant == CifarVariant::cifar10) {
    Dataset train;
    for (int b = 1; b <= 5; ++b) {
      Dataset part = load_cifar_file(join("data_batch_" + std::to_string(b) + ".bin"),
                                     variant, "train");
      if (train.n == 0) {
        train = std::move(part);
      } else {
        train.images.insert(train.images.end(), part.images.begin(), part.images.end());
        train.labels.insert(train.labels.end(), part.labels.begin(), part.labels.end());
        train.n += part.n;
      }
    }
    Dataset test = load_cifar_file(join("test_batch.bin"), variant, "test");
    return {std::move(train), std::move(test)};
  }
  Dataset train = load_cifar_file(join("train.bin"), variant, "train");
  Dataset test = load_cifar_file(join("test.bin"), variant, "test");
  return {std::move(train), std::move(test)};
}

Dataset make_synthetic(int k, int per_class, int c, int h, int w, uint64_t seed,
                       const std::string& split, double noise_sigma,
                       double contrast, double hard_fraction) {
  if (k < 2) throw InputError("make_synthetic: need at least 2 classes");
  if (per_class < 1) throw InputError("make_synthetic: per_class must be >= 1");
  if (c < 1 || h < 1 || w < 1) throw InputError("make_synthetic: bad image shape");
  if (noise_sigma < 0.0 || contrast < 0.0)
    throw InputError("make_synthetic: noise and contrast must be >= 0");
  if (hard_fraction < 0.0 || hard_fraction > 1.0)
    throw InputError("make_synthetic: hard_fraction must be in [0,1]");

  Dataset d;
  d.n = k * per_class;
  d.c = c;
  d.h = h;
  d.w = w;
  d.k = k;
  d.split = split;
  const int64_t sz = d.image_size();
  d.images.resize(static_cast<size_t>(d.n) * sz);
  d.labels.resize(static_cast<size_t>(d.n));

  // Images are concentric cosine rings around the image center. Rings are
  // symmetric under horizontal and vertical flips and rotations about the
  // center, and keep their frequency under small crops and translations, so
  // standard augmentations preserve the label. Regular samples share a
  // class pattern whose frequency encodes the class; a hard_fraction of
  // samples instead carry a sample-specific ring drawn from a reserved
  // higher band, so their label is recoverable only by memorizing that
  // sample. Frequencies stay below the radial Nyquist limit f <= R/2.
  const double cy = (h - 1) / 2.0;
  const double cx = (w - 1) / 2.0;
  const double radius = std::max(h, w) / 2.0;
  const double nyquist = radius / 2.0;
  const double f_lo = 0.5;
  const double f_hi = std::max(f_lo, std::min(2.75, 0.8 * nyquist));
  const double key_hi = nyquist;
  const double key_lo = std::min(key_hi, std::max(f_hi + 0.1, 0.88 * nyquist));

  const auto render_ring = [&](float* dst, double freq,
                               std::span<const double> phase,
                               std::span<const double> amp) {
    int64_t j = 0;
    for (int ch = 0; ch < c; ++ch) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x, ++j) {
          const double rho = std::hypot(y - cy, x - cx) / radius;
          const double wave = std::cos(2.0 * kPi * freq * rho +
                                       phase[static_cast<size_t>(ch)]);
          dst[j] = static_cast<float>(amp[static_cast<size_t>(ch)] * wave);
        }
      }
    }
  };

  std::vector<float> patterns(static_cast<size_t>(k) * sz);
  std::vector<double> phase(static_cast<size_t>(c));
  std::vector<double> amp(static_cast<size_t>(c));
  for (int cls = 0; cls < k; ++cls) {
    rng::Stream ps(rng::stream_key(seed, "synth-pattern", static_cast<uint64_t>(cls)));
    const double freq = f_lo + (f_hi - f_lo) * cls / (k - 1);
    std::fill(phase.begin(), phase.end(), 2.0 * kPi * ps.next_unit());
    for (int ch = 0; ch < c; ++ch)
      amp[static_cast<size_t>(ch)] = contrast * (0.6 + 0.4 * ps.next_unit());
    render_ring(patterns.data() + static_cast<size_t>(cls) * sz, freq, phase, amp);
  }

  const uint64_t split_id = rng::hash_name(split);
  std::vector<float> keyed(static_cast<size_t>(sz));
  for (int i = 0; i < d.n; ++i) {
    const int cls = i / per_class;
    d.labels[static_cast<size_t>(i)] = cls;
    rng::Stream ss(rng::stream_key(seed, "synth-sample", split_id,
                                   static_cast<uint64_t>(i)));
    const float* p = patterns.data() + static_cast<size_t>(cls) * sz;
    if (ss.next_unit() < hard_fraction) {
      const double freq = key_lo + (key_hi - key_lo) * ss.next_unit();
      for (int ch = 0; ch < c; ++ch) {
        phase[static_cast<size_t>(ch)] = 2.0 * kPi * ss.next_unit();
        double a = contrast * (0.6 + 0.4 * ss.next_unit());
        if (ss.next_unit() < 0.5) a = -a;
        amp[static_cast<size_t>(ch)] = a;
      }
      render_ring(keyed.data(), freq, phase, amp);
      p = keyed.data();
    }
    float* dst = d.images.data() + static_cast<size_t>(i) * sz;
    for (int64_t j = 0; j < sz; ++j) {
      const double v = 0.5 + p[j] + noise_sigma * ss.next_gaussian();
      dst[j] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return d;
}

ForgetPartition split_forget(const Dataset& data, ForgetMode mode,
                             double parameter, uint64_t seed) {
  if (data.n <= 0) throw InputError("split_forget: empty dataset");

  ForgetPartition part;
  part.mode = mode;
  part.parameter = parameter;
  part.seed = seed;

  if (mode == ForgetMode::random) {
    if (!(parameter > 0.0) || parameter > 1.0)
      throw InputError("split_forget: rate must be in (0,1]");
    const int count = static_cast<int>(std::llround(parameter * data.n));
    if (count == 0)
      throw InputError("split_forget: rate selects zero forget samples");
    std::vector<int32_t> order(static_cast<size_t>(data.n));
    std::iota(order.begin(), order.end(), 0);
    rng::Stream s(rng::stream_key(seed, "forget"));
    s.shuffle(order);
    part.forget.assign(order.begin(), order.begin() + count);
    std::sort(part.forget.begin(), part.forget.end());
  } else {
    const int cls = static_cast<int>(std::llround(parameter));
    if (cls < 0 || cls >= data.k)
      throw InputError("split_forget: class id out of range");
    for (int i = 0; i < data.n; ++i)
      if (data.labels[static_cast<size_t>(i)] == cls)
        part.forget.push_back(i);
    if (part.forget.empty())
      throw InputError("split_forget: class has no samples");
  }

  part.remain.reserve(static_cast<size_t>(data.n) - part.forget.size());
  size_t fi = 0;
  for (int i = 0; i < data.n; ++i) {
    if (fi < part.forget.size() && part.forget[fi] == i) {
      ++fi;
    } else {
      part.remain.push_back(i);
    }
  }
  return part;
}

std::pair<Tensor, std::vector<int32_t>> gather_batch(
    const Dataset& data, std::span<const int32_t> indices,
    const std::vector<int32_t>* label_override) {
  if (indices.empty()) throw InputError("gather_batch: empty index list");
  const int64_t sz = data.image_size();
  Tensor batch = Tensor::zeros({static_cast<int>(indices.size()), data.c, data.h, data.w});
  std::vector<int32_t> labels(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    const int32_t idx = indices[i];
    if (idx < 0 || idx >= data.n) throw UsageError("gather_batch: index out of range");
    const float* src = data.images.data() + static_cast<int64_t>(idx) * sz;
    std::copy(src, src + sz, batch.v.data() + static_cast<int64_t>(i) * sz);
    labels[i] = label_override ? (*label_override)[static_cast<size_t>(idx)]
                               : data.labels[static_cast<size_t>(idx)];
  }
  return {std::move(batch), std::move(labels)};
}

}  // namespace mulab
