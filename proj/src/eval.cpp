#include "mulab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "mulab/errors.hpp"
#include "mulab/rng.hpp"

namespace mulab {

void validate_metrics(const MetricsRecord& rec) {
  auto percent = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 100.0))
      throw InputError(std::string(name) + " must be in [0, 100]");
  };
  percent(rec.ua, "UA");
  percent(rec.ra, "RA");
  percent(rec.ta, "TA");
  percent(rec.mia, "MIA");
  if (!(rec.rte >= 0.0) || !std::isfinite(rec.rte))
    throw InputError("RTE must be finite and >= 0");
}

std::string gap_mode_name(GapMode mode) {
  return mode == GapMode::per_seed ? "per-seed" : "of-means";
}

GapMode gap_mode_from_name(const std::string& name) {
  if (name == "per-seed") return GapMode::per_seed;
  if (name == "of-means") return GapMode::of_means;
  throw InputError("unknown gap mode: " + name);
}

CoreAccuracies core_accuracies(Model& m, const ForgetPartition& part,
                               const Dataset& train, const Dataset& test) {
  if (part.forget.empty()) throw InputError("forget set is empty");
  if (part.remain.empty()) throw InputError("remain set is empty");
  if (test.n <= 0) throw InputError("test set is empty");
  CoreAccuracies acc;
  acc.ua = accuracy_on(m, train, part.forget);
  acc.ra = accuracy_on(m, train, part.remain);
  acc.ta = accuracy(m, test);
  return acc;
}

std::vector<double> true_class_confidences(Model& m, const Dataset& data,
                                           std::span<const int32_t> indices,
                                           int batch_size) {
  if (batch_size < 1) throw InputError("batch size must be >= 1");
  std::vector<double> conf;
  conf.reserve(indices.size());
  const int k = data.k;
  for (size_t b0 = 0; b0 < indices.size();
       b0 += static_cast<size_t>(batch_size)) {
    const size_t bn =
        std::min(static_cast<size_t>(batch_size), indices.size() - b0);
    auto [batch, labels] =
        gather_batch(data, indices.subspan(b0, bn));
    Tensor logits = predict(m, batch);
    for (size_t i = 0; i < bn; ++i) {
      const float* row = logits.v.data() + static_cast<size_t>(i) * k;
      double max_logit = row[0];
      for (int c = 1; c < k; ++c)
        max_logit = std::max(max_logit, static_cast<double>(row[c]));
      double denom = 0;
      for (int c = 0; c < k; ++c)
        denom += std::exp(static_cast<double>(row[c]) - max_logit);
      const auto y = static_cast<size_t>(labels[i]);
      conf.push_back(
          std::exp(static_cast<double>(row[y]) - max_logit) / denom);
    }
  }
  return conf;
}

MiaAttacker fit_mia_threshold(std::span<const double> member_conf,
                              std::span<const double> nonmember_conf) {
  if (member_conf.empty()) throw InputError("member confidence set is empty");
  if (nonmember_conf.empty())
    throw InputError("nonmember confidence set is empty");

  std::vector<double> values;
  values.reserve(member_conf.size() + nonmember_conf.size());
  values.insert(values.end(), member_conf.begin(), member_conf.end());
  values.insert(values.end(), nonmember_conf.begin(), nonmember_conf.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() < 2)
    throw FitError("confidence distribution is a single value");

  std::vector<double> members(member_conf.begin(), member_conf.end());
  std::vector<double> nonmembers(nonmember_conf.begin(), nonmember_conf.end());
  std::sort(members.begin(), members.end());
  std::sort(nonmembers.begin(), nonmembers.end());
  const auto m = static_cast<double>(members.size());
  const auto n = static_cast<double>(nonmembers.size());

  MiaAttacker best;
  best.n_members = static_cast<int64_t>(members.size());
  best.n_nonmembers = static_cast<int64_t>(nonmembers.size());
  double best_balanced = -1;
  for (double t : values) {
    const auto mem_lt = static_cast<double>(
        std::lower_bound(members.begin(), members.end(), t) -
        members.begin());
    const auto non_lt = static_cast<double>(
        std::lower_bound(nonmembers.begin(), nonmembers.end(), t) -
        nonmembers.begin());
    const double balanced = ((m - mem_lt) / m + non_lt / n) / 2.0;
    if (balanced > best_balanced) {
      best_balanced = balanced;
      best.threshold = t;
    }
  }
  best.fit_accuracy = best_balanced * 100.0;
  return best;
}

namespace {

std::vector<int32_t> subsample_sorted(const std::vector<int32_t>& pool,
                                      size_t n, uint64_t key_seed,
                                      const char* stream_name) {
  std::vector<int32_t> picked = pool;
  rng::Stream s(rng::stream_key(key_seed, stream_name));
  s.shuffle(picked);
  picked.resize(n);
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

MiaAttacker fit_mia_attacker(Model& m, const ForgetPartition& part,
                             const Dataset& train, const Dataset& test,
                             uint64_t seed) {
  if (part.remain.empty()) throw InputError("remain set is empty");
  if (test.n <= 0) throw InputError("test set is empty");
  const size_t n =
      std::min(part.remain.size(), static_cast<size_t>(test.n));

  std::vector<int32_t> member_idx =
      subsample_sorted(part.remain, n, seed, "mia");
  std::vector<int32_t> test_pool(static_cast<size_t>(test.n));
  std::iota(test_pool.begin(), test_pool.end(), 0);
  std::vector<int32_t> nonmember_idx =
      subsample_sorted(test_pool, n, seed, "mia-nonmember");

  std::vector<double> member_conf =
      true_class_confidences(m, train, member_idx);
  std::vector<double> nonmember_conf =
      true_class_confidences(m, test, nonmember_idx);
  return fit_mia_threshold(member_conf, nonmember_conf);
}

double mia_flag_rate(std::span<const double> confidences, double threshold) {
  if (confidences.empty()) throw InputError("confidence set is empty");
  int64_t flagged = 0;
  for (double c : confidences)
    if (c >= threshold) ++flagged;
  return 100.0 * static_cast<double>(flagged) /
         static_cast<double>(confidences.size());
}

double mia_score(Model& m, const ForgetPartition& part, const Dataset& train,
                 const MiaAttacker& attacker) {
  if (part.forget.empty()) throw InputError("forget set is empty");
  std::vector<double> conf = true_class_confidences(m, train, part.forget);
  return mia_flag_rate(conf, attacker.threshold);
}

namespace {

struct MetricMeans {
  double ua = 0, ra = 0, ta = 0, mia = 0;
};

MetricMeans means_of(const std::vector<MetricsRecord>& runs) {
  MetricMeans out;
  for (const auto& r : runs) {
    out.ua += r.ua;
    out.ra += r.ra;
    out.ta += r.ta;
    out.mia += r.mia;
  }
  const auto n = static_cast<double>(runs.size());
  out.ua /= n;
  out.ra /= n;
  out.ta /= n;
  out.mia /= n;
  return out;
}

std::map<uint64_t, const MetricsRecord*> by_seed(
    const std::vector<MetricsRecord>& runs) {
  std::map<uint64_t, const MetricsRecord*> out;
  for (const auto& r : runs)
    if (!out.emplace(r.seed, &r).second)
      throw InputError("duplicate seed " + std::to_string(r.seed) +
                       " in run list");
  return out;
}

}  // namespace

GapRecord metric_gap(const std::vector<MetricsRecord>& unlearned,
                     const std::vector<MetricsRecord>& retrained,
                     GapMode mode) {
  if (unlearned.empty() || retrained.empty())
    throw InputError("metric_gap needs nonempty run lists");

  GapRecord gaps;
  gaps.mode = mode;
  if (mode == GapMode::of_means) {
    const MetricMeans mu = means_of(unlearned);
    const MetricMeans re = means_of(retrained);
    gaps.ua = std::fabs(mu.ua - re.ua);
    gaps.ra = std::fabs(mu.ra - re.ra);
    gaps.ta = std::fabs(mu.ta - re.ta);
    gaps.mia = std::fabs(mu.mia - re.mia);
  } else {
    auto mu = by_seed(unlearned);
    auto re = by_seed(retrained);
    if (mu.size() != re.size())
      throw InputError("per-seed gap needs equal run counts");
    for (const auto& [seed, mu_rec] : mu) {
      auto it = re.find(seed);
      if (it == re.end())
        throw InputError("per-seed gap: seed " + std::to_string(seed) +
                         " has no retrain run");
      const MetricsRecord* re_rec = it->second;
      gaps.ua += std::fabs(mu_rec->ua - re_rec->ua);
      gaps.ra += std::fabs(mu_rec->ra - re_rec->ra);
      gaps.ta += std::fabs(mu_rec->ta - re_rec->ta);
      gaps.mia += std::fabs(mu_rec->mia - re_rec->mia);
    }
    const auto n = static_cast<double>(mu.size());
    gaps.ua /= n;
    gaps.ra /= n;
    gaps.ta /= n;
    gaps.mia /= n;
  }
  gaps.ag = average_gap(gaps);
  return gaps;
}

double average_gap(const GapRecord& gaps) {
  return (gaps.ua + gaps.ra + gaps.ta + gaps.mia) / 4.0;
}

}  // namespace mulab
