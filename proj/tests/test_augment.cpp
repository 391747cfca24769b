#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mulab/augment.hpp"
#include "mulab/errors.hpp"
#include "mulab/rng.hpp"
#include "pil_fixtures.hpp"
#include "ra_golden.hpp"

using namespace mulab;

namespace {

Image image_from_u8(const uint8_t* data, int c, int h, int w) {
  Image im;
  im.c = c;
  im.h = h;
  im.w = w;
  im.v.resize(static_cast<size_t>(c) * h * w);
  for (size_t i = 0; i < im.v.size(); ++i) im.v[i] = data[i] / 255.f;
  return im;
}

int u8_mismatches(const Image& im, const uint8_t* expect) {
  int bad = 0;
  for (size_t i = 0; i < im.v.size(); ++i) {
    const double c = std::min(1.0, std::max(0.0, static_cast<double>(im.v[i])));
    if (std::lround(c * 255.0) != expect[i]) ++bad;
  }
  return bad;
}

Image ramp3() {
  Image im;
  im.c = 1;
  im.h = 3;
  im.w = 3;
  im.v = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  return im;
}

Image random_image(rng::Stream& s, int c, int h, int w) {
  Image im;
  im.c = c;
  im.h = h;
  im.w = w;
  im.v.resize(static_cast<size_t>(c) * h * w);
  for (auto& v : im.v) v = static_cast<float>(s.next_unit());
  return im;
}

}  // namespace

TEST_CASE("crop with zero pad is the identity") {
  Image im = ramp3();
  const Image before = im;
  crop_shifted(im, 0, 0, 0);
  CHECK(im.v == before.v);
}

TEST_CASE("center crop offset cancels the padding") {
  rng::Stream s(rng::stream_key(3, "crop-id"));
  Image im = random_image(s, 3, 32, 32);
  const Image before = im;
  crop_shifted(im, 4, 4, 4);
  CHECK(im.v == before.v);
}

TEST_CASE("corner crop offset shifts the ramp and zero-fills the border") {
  Image im = ramp3();
  crop_shifted(im, 1, 0, 0);
  CHECK(im.v == std::vector<float>{0, 0, 0, 0, 1, 2, 0, 4, 5});
}

TEST_CASE("flip is an involution and fixes symmetric images") {
  rng::Stream s(rng::stream_key(4, "flip"));
  Image im = random_image(s, 2, 5, 6);
  const Image before = im;
  flip_horizontal(im);
  CHECK(im.v != before.v);
  flip_horizontal(im);
  CHECK(im.v == before.v);

  Image sym = ramp3();
  sym.v = {1, 2, 1, 4, 5, 4, 7, 8, 7};
  const Image sym_before = sym;
  flip_horizontal(sym);
  CHECK(sym.v == sym_before.v);
}

TEST_CASE("flip probability zero never fires") {
  rng::Stream s(rng::stream_key(5, "flip-p0"));
  Image im = ramp3();
  const Image before = im;
  for (int i = 0; i < 50; ++i) horizontal_flip(im, 0.0, s);
  CHECK(im.v == before.v);
}

TEST_CASE("full-area erase blanks the image") {
  Image im = ramp3();
  erase_rect(im, 0, 0, 3, 3, 0.f);
  CHECK(im.v == std::vector<float>(9, 0.f));
}

TEST_CASE("erase probability zero is the identity") {
  rng::Stream s(rng::stream_key(6, "erase-p0"));
  Image im = ramp3();
  const Image before = im;
  EraseParams params;
  params.p = 0.0;
  for (int i = 0; i < 20; ++i) random_erase(im, params, s);
  CHECK(im.v == before.v);
}

TEST_CASE("seeded erase blanks an area inside the configured band") {
  EraseParams params;
  params.p = 1.0;
  const double hw = 32.0 * 32.0;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    rng::Stream s(rng::stream_key(seed, "erase-band"));
    Image im;
    im.c = 1;
    im.h = 32;
    im.w = 32;
    im.v.assign(32 * 32, 1.f);
    nlohmann::ordered_json ops = nlohmann::ordered_json::array();
    random_erase(im, params, s, &ops);
    REQUIRE(ops.size() == 1);
    REQUIRE(ops[0]["applied"].get<bool>());
    const auto zeros = static_cast<double>(
        std::count(im.v.begin(), im.v.end(), 0.f));
    CHECK(zeros >= params.area_lo * hw);
    CHECK(zeros <= params.area_hi * hw);
  }
}

TEST_CASE("translate shifts content and zero-fills") {
  Image im = ramp3();
  translate_x_nn(im, 1);
  CHECK(im.v == std::vector<float>{0, 1, 2, 0, 4, 5, 0, 7, 8});
  Image im2 = ramp3();
  translate_y_nn(im2, -1);
  CHECK(im2.v == std::vector<float>{4, 5, 6, 7, 8, 9, 0, 0, 0});
  Image im3 = ramp3();
  translate_x_nn(im3, 5);
  CHECK(im3.v == std::vector<float>(9, 0.f));
}

TEST_CASE("quarter-turn rotation permutes the ramp exactly") {
  Image im = ramp3();
  rotate_nn(im, 90.0);
  CHECK(im.v == std::vector<float>{7, 4, 1, 8, 5, 2, 9, 6, 3});
}

TEST_CASE("unit shear slides rows around the vertical center") {
  Image im = ramp3();
  shear_x_nn(im, 1.0);
  CHECK(im.v == std::vector<float>{0, 1, 2, 4, 5, 6, 8, 9, 0});
}

TEST_CASE("zero-magnitude table ops are exact identities") {
  rng::Stream s(rng::stream_key(7, "zero-mag"));
  for (TableOp op : {TableOp::identity, TableOp::rotate, TableOp::shear_x,
                     TableOp::shear_y, TableOp::translate_x,
                     TableOp::translate_y, TableOp::brightness,
                     TableOp::contrast, TableOp::color, TableOp::sharpness}) {
    Image im = random_image(s, 3, 6, 6);
    const Image before = im;
    apply_table_op(im, op, 0.0, 1);
    CHECK(im.v == before.v);
  }
}

TEST_CASE("brightness endpoints and hand values") {
  Image im = ramp3();
  for (auto& v : im.v) v /= 10.f;
  Image zero = im;
  adjust_brightness(zero, 0.0);
  CHECK(zero.v == std::vector<float>(9, 0.f));
  Image half = im;
  adjust_brightness(half, 0.5);
  for (size_t i = 0; i < half.v.size(); ++i)
    CHECK(half.v[i] == doctest::Approx(0.5 * im.v[i]).epsilon(1e-6));
  Image big = im;
  adjust_brightness(big, 20.0);
  CHECK(*std::max_element(big.v.begin(), big.v.end()) == 1.f);
}

TEST_CASE("contrast factor zero collapses to the mean") {
  rng::Stream s(rng::stream_key(8, "contrast"));
  Image im = random_image(s, 3, 4, 4);
  double mean = 0.0;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      mean += 0.299 * im.at(0, y, x) + 0.587 * im.at(1, y, x) +
              0.114 * im.at(2, y, x);
  mean /= 16.0;
  adjust_contrast(im, 0.0);
  for (float v : im.v) CHECK(v == doctest::Approx(mean).epsilon(1e-6));
}

TEST_CASE("color factor zero grays out an rgb image") {
  rng::Stream s(rng::stream_key(9, "color"));
  Image im = random_image(s, 3, 4, 4);
  const Image before = im;
  adjust_color(im, 0.0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      const double l = 0.299 * before.at(0, y, x) + 0.587 * before.at(1, y, x) +
                       0.114 * before.at(2, y, x);
      for (int ch = 0; ch < 3; ++ch)
        CHECK(im.at(ch, y, x) == doctest::Approx(l).epsilon(1e-6));
    }
}

TEST_CASE("sharpness factor one is the identity and borders never move") {
  rng::Stream s(rng::stream_key(10, "sharp"));
  Image im = random_image(s, 2, 5, 5);
  Image same = im;
  adjust_sharpness(same, 1.0);
  CHECK(same.v == im.v);

  Image blurred = im;
  adjust_sharpness(blurred, 0.0);
  for (int ch = 0; ch < 2; ++ch)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x)
        if (y == 0 || y == 4 || x == 0 || x == 4)
          CHECK(blurred.at(ch, y, x) == im.at(ch, y, x));
  // interior pixel equals the 3x3 smoothing stencil
  double acc = 0.0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      acc += im.at(0, 2 + dy, 2 + dx) * (dy == 0 && dx == 0 ? 5.0 : 1.0);
  CHECK(blurred.at(0, 2, 2) == doctest::Approx(acc / 13.0).epsilon(1e-6));
}

TEST_CASE("solarize inverts pixels at or above the threshold") {
  Image im;
  im.c = 1;
  im.h = 1;
  im.w = 5;
  im.v = {0.f, 0.25f, 0.5f, 0.75f, 1.f};
  solarize_threshold(im, 0.5);
  CHECK(im.v[0] == 0.f);
  CHECK(im.v[1] == 0.25f);
  CHECK(im.v[2] == 0.5f);
  CHECK(im.v[3] == 0.25f);
  CHECK(im.v[4] == 0.f);
}

TEST_CASE("posterize keeps the top bits") {
  Image im = image_from_u8(testutil::kFixA, 3, 16, 16);
  Image full = im;
  posterize_bits(full, 8);
  CHECK(u8_mismatches(full, testutil::kFixA) == 0);
  Image one = im;
  posterize_bits(one, 1);
  for (float v : one.v) CHECK((v == 0.f || v == 128.f / 255.f));
}

TEST_CASE("double inversion restores the quantized image") {
  Image im = image_from_u8(testutil::kFixA, 3, 16, 16);
  invert_image(im);
  invert_image(im);
  CHECK(u8_mismatches(im, testutil::kFixA) == 0);
}

TEST_CASE("histogram ops match the frozen reference outputs") {
  Image eq_a = image_from_u8(testutil::kFixA, 3, 16, 16);
  equalize_image(eq_a);
  CHECK(u8_mismatches(eq_a, testutil::kEqualizeA) == 0);

  Image eq_c = image_from_u8(testutil::kFixC, 1, 32, 32);
  equalize_image(eq_c);
  CHECK(u8_mismatches(eq_c, testutil::kEqualizeC) == 0);

  Image ac_a = image_from_u8(testutil::kFixA, 3, 16, 16);
  autocontrast_image(ac_a);
  CHECK(u8_mismatches(ac_a, testutil::kAutocontrastA) == 0);

  Image ac_b = image_from_u8(testutil::kFixB, 3, 16, 16);
  autocontrast_image(ac_b);
  CHECK(u8_mismatches(ac_b, testutil::kAutocontrastB) == 0);

  Image po_a = image_from_u8(testutil::kFixA, 3, 16, 16);
  posterize_bits(po_a, 4);
  CHECK(u8_mismatches(po_a, testutil::kPosterize4A) == 0);

  Image so_a = image_from_u8(testutil::kFixA, 3, 16, 16);
  solarize_threshold(so_a, 128.f / 255.f);
  CHECK(u8_mismatches(so_a, testutil::kSolarize128A) == 0);
}

TEST_CASE("equalize keeps constant channels") {
  Image im;
  im.c = 2;
  im.h = 4;
  im.w = 4;
  im.v.assign(32, 0.4f);
  const Image before = im;
  equalize_image(im);
  CHECK(im.v == before.v);
  autocontrast_image(im);
  CHECK(im.v == before.v);
}

TEST_CASE("trivial augment draws ops uniformly") {
  rng::Stream s(rng::stream_key(0, "chi"));
  std::map<std::string, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Image im;
    im.c = 1;
    im.h = 4;
    im.w = 4;
    im.v.assign(16, 0.5f);
    nlohmann::ordered_json ops = nlohmann::ordered_json::array();
    trivial_augment(im, s, &ops);
    REQUIRE(ops.size() == 1);
    ++counts[ops[0]["op"].get<std::string>()];
  }
  CHECK(counts.size() == 14);
  const double expect = static_cast<double>(draws) / kDrawOps;
  double chi2 = 0.0;
  for (const auto& [name, obs] : counts)
    chi2 += (obs - expect) * (obs - expect) / expect;
  // 99th percentile of chi-square with 13 degrees of freedom
  CHECK(chi2 < 27.688);
}

TEST_CASE("trivial magnitude bins stay in range and cover both ends") {
  rng::Stream s(rng::stream_key(1, "bins"));
  bool saw_low = false, saw_high = false;
  for (int i = 0; i < 2000; ++i) {
    Image im;
    im.c = 1;
    im.h = 2;
    im.w = 2;
    im.v.assign(4, 0.5f);
    nlohmann::ordered_json ops = nlohmann::ordered_json::array();
    trivial_augment(im, s, &ops);
    const double level = ops[0]["level"].get<double>();
    CHECK(level >= 0.0);
    CHECK(level <= 1.0);
    if (level == 0.0) saw_low = true;
    if (level == 1.0) saw_high = true;
  }
  CHECK(saw_low);
  CHECK(saw_high);
}

TEST_CASE("rand augment applies exactly n ops at the fixed magnitude") {
  rng::Stream s(rng::stream_key(2, "ra-count"));
  Image im = random_image(s, 3, 8, 8);
  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  rand_augment(im, 2, 9, s, &ops);
  REQUIRE(ops.size() == 2);
  for (const auto& entry : ops)
    CHECK(entry["level"].get<double>() == doctest::Approx(9.0 / 30.0));
  CHECK_THROWS_AS(rand_augment(im, 0, 9, s), InputError);
  CHECK_THROWS_AS(rand_augment(im, 1, 31, s), InputError);
}

TEST_CASE("rand augment on the ramp fixture matches the frozen golden") {
  Image im;
  im.c = 3;
  im.h = 8;
  im.w = 8;
  im.v.resize(192);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        im.v[(c * 8 + y) * 8 + x] =
            (((c * 64 + y * 8 + x) * 7 + 13) % 256) / 255.f;
  rng::Stream s(rng::stream_key(123, "golden"));
  rand_augment(im, 2, 9, s);
  int bad = 0;
  for (size_t i = 0; i < im.v.size(); ++i)
    if (im.v[i] != testutil::kRandAugmentGolden[i]) ++bad;
  CHECK(bad == 0);
}

TEST_CASE("auto augment sub-policy with zero probabilities is the identity") {
  std::vector<AutoAugmentSubPolicy> table = {
      {{{TableOp::rotate, 0.0, 9}, {TableOp::invert, 0.0, 3}}}};
  rng::Stream s(rng::stream_key(3, "aa-zero"));
  Image im = ramp3();
  const Image before = im;
  for (int i = 0; i < 10; ++i) auto_augment(im, table, s);
  CHECK(im.v == before.v);
}

TEST_CASE("auto augment identity ops always firing keep the image") {
  std::vector<AutoAugmentSubPolicy> table = {
      {{{TableOp::identity, 1.0, 0}, {TableOp::identity, 1.0, 0}}}};
  rng::Stream s(rng::stream_key(4, "aa-id"));
  Image im = ramp3();
  const Image before = im;
  auto_augment(im, table, s);
  CHECK(im.v == before.v);
}

TEST_CASE("auto augment replays bit-identically with the same stream key") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    rng::Stream init(rng::stream_key(seed, "aa-img"));
    const Image src = random_image(init, 3, 16, 16);

    Image a = src;
    rng::Stream s1(rng::stream_key(seed, "aa-replay"));
    nlohmann::ordered_json ops1 = nlohmann::ordered_json::array();
    auto_augment(a, cifar10_auto_augment(), s1, &ops1);

    Image b = src;
    rng::Stream s2(rng::stream_key(seed, "aa-replay"));
    nlohmann::ordered_json ops2 = nlohmann::ordered_json::array();
    auto_augment(b, cifar10_auto_augment(), s2, &ops2);

    CHECK(a.v == b.v);
    CHECK(ops1 == ops2);
    REQUIRE(ops1.size() == 1);
    CHECK(ops1[0]["gates"].size() == 2);
    CHECK(ops1[0]["sub_policy"].get<size_t>() < 25);
  }
}

TEST_CASE("augmix blend with full original weight returns the original") {
  rng::Stream s(rng::stream_key(5, "mix"));
  const Image orig = random_image(s, 3, 6, 6);
  std::vector<Image> chains = {random_image(s, 3, 6, 6),
                               random_image(s, 3, 6, 6)};
  const Image out = augmix_blend(orig, chains, {0.25, 0.75}, 1.0);
  CHECK(out.v == orig.v);
}

TEST_CASE("augmix blend of identical chains returns the original") {
  rng::Stream s(rng::stream_key(6, "mix-id"));
  const Image orig = random_image(s, 3, 6, 6);
  const std::vector<Image> chains = {orig, orig, orig};
  const std::vector<double> w = s.next_dirichlet(1.0, 3);
  const Image out = augmix_blend(orig, chains, w, s.next_beta(1.0, 1.0));
  CHECK(out.v == orig.v);
}

TEST_CASE("dirichlet chain weights form a simplex point") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    rng::Stream s(rng::stream_key(seed, "dirichlet"));
    const std::vector<double> w = s.next_dirichlet(1.0, 3);
    double sum = 0.0;
    for (double x : w) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("augmix logs weights, mix and chain depths within bounds") {
  rng::Stream img_stream(rng::stream_key(7, "mix-img"));
  Image im = random_image(img_stream, 3, 8, 8);
  rng::Stream s(rng::stream_key(7, "mix-run"));
  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  AugMixParams params;
  augmix(im, params, s, &ops);
  REQUIRE(ops.size() == 1);
  const auto& rec = ops[0];
  CHECK(rec["weights"].size() == 3);
  const double m = rec["m"].get<double>();
  CHECK(m >= 0.0);
  CHECK(m <= 1.0);
  REQUIRE(rec["chains"].size() == 3);
  for (const auto& chain : rec["chains"]) {
    CHECK(chain.size() >= 1);
    CHECK(chain.size() <= 3);
  }
}

TEST_CASE("no-aug policy is bit-identical") {
  rng::Stream s(rng::stream_key(8, "noaug"));
  Image im = random_image(s, 3, 12, 12);
  const Image before = im;
  AugmentPolicy policy;
  policy.scenario = Scenario::no_aug;
  TransformLog log;
  apply_policy(policy, im, 3, 1, 17, &log);
  CHECK(im.v == before.v);
  REQUIRE(log.records.size() == 1);
  CHECK(log.records[0]["ops"].empty());
  CHECK(log.records[0]["scenario"] == "NoAug");
}

TEST_CASE("every scenario is deterministic in (seed, sample, epoch)") {
  rng::Stream s(rng::stream_key(9, "det-img"));
  const Image src = random_image(s, 3, 12, 12);
  for (Scenario sc : all_scenarios) {
    AugmentPolicy policy;
    policy.scenario = sc;
    Image a = src;
    TransformLog la;
    apply_policy(policy, a, 41, 7, 123, &la);
    Image b = src;
    TransformLog lb;
    apply_policy(policy, b, 41, 7, 123, &lb);
    CHECK(a.v == b.v);
    CHECK(la.records == lb.records);
    CHECK(la.records[0]["scenario"] == scenario_name(sc));
  }
}

TEST_CASE("every scenario preserves shape and the value range") {
  rng::Stream s(rng::stream_key(10, "range-img"));
  for (Scenario sc : all_scenarios) {
    AugmentPolicy policy;
    policy.scenario = sc;
    for (int trial = 0; trial < 12; ++trial) {
      Image im = random_image(s, 3, 12, 12);
      const size_t size = im.v.size();
      apply_policy(policy, im, trial, trial / 4, 7, nullptr);
      CHECK(im.v.size() == size);
      bool ok = true;
      for (float v : im.v)
        if (!(v >= 0.f && v <= 1.f)) ok = false;
      CHECK(ok);
    }
  }
}

TEST_CASE("default scenario logs the crop and flip draws first") {
  rng::Stream s(rng::stream_key(11, "log-order"));
  Image im = random_image(s, 3, 12, 12);
  AugmentPolicy policy;
  policy.scenario = Scenario::default_trivial_aug;
  TransformLog log;
  apply_policy(policy, im, 0, 0, 99, &log);
  const auto& ops = log.records[0]["ops"];
  REQUIRE(ops.size() == 3);
  CHECK(ops[0]["op"] == "crop");
  CHECK(ops[1]["op"] == "flip");
  const std::string dumped = log.dump();
  CHECK(std::count(dumped.begin(), dumped.end(), '\n') == 1);
}

TEST_CASE("scenario names round-trip and unknown names are rejected") {
  for (Scenario sc : all_scenarios)
    CHECK(scenario_from_name(scenario_name(sc)) == sc);
  CHECK_THROWS_AS(scenario_from_name("Default+Mixup"), InputError);
}

TEST_CASE("published auto augment table has 25 sub-policies") {
  const auto& table = cifar10_auto_augment();
  CHECK(table.size() == 25);
  for (const auto& sub : table)
    for (const auto& entry : sub) {
      CHECK(entry.p >= 0.0);
      CHECK(entry.p <= 1.0);
      CHECK(entry.magnitude >= 0);
      CHECK(entry.magnitude <= 9);
    }
}
