#include "mulab/runner.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "mulab/augment.hpp"
#include "mulab/errors.hpp"
#include "mulab/eval.hpp"
#include "mulab/models.hpp"
#include "mulab/rng.hpp"
#include "mulab/unlearn.hpp"

namespace mulab {

namespace fs = std::filesystem;

namespace {

std::string hex16(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Writes via a temp file and rename so a crash never leaves a half-written
// artifact behind.
void atomic_write(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + tmp.string());
    out << text;
    if (!out) throw IoError("failed writing file: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::ordered_json metrics_to_json(const MetricsRecord& rec) {
  nlohmann::ordered_json j;
  j["method"] = rec.method;
  j["policy"] = rec.policy;
  j["seed"] = rec.seed;
  j["UA"] = rec.ua;
  j["RA"] = rec.ra;
  j["TA"] = rec.ta;
  j["MIA"] = rec.mia;
  j["RTE"] = rec.rte;
  return j;
}

std::optional<MetricsRecord> try_load_metrics(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
    MetricsRecord rec;
    rec.method = j.at("method").get<std::string>();
    rec.policy = j.at("policy").get<std::string>();
    rec.seed = j.at("seed").get<uint64_t>();
    rec.ua = j.at("UA").get<double>();
    rec.ra = j.at("RA").get<double>();
    rec.ta = j.at("TA").get<double>();
    rec.mia = j.at("MIA").get<double>();
    rec.rte = j.at("RTE").get<double>();
    return rec;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

ArchSpec arch_for(const ExperimentConfig& cfg, const Dataset& train) {
  ArchSpec arch;
  arch.kind = arch_kind_from_name(cfg.arch_kind);
  arch.c = train.c;
  arch.h = train.h;
  arch.w = train.w;
  arch.classes = train.k;
  arch.width = cfg.arch_width;
  return arch;
}

AugmentPolicy policy_for(const ExperimentConfig& cfg, const std::string& name) {
  AugmentPolicy policy;
  policy.scenario = scenario_from_name(name);
  policy.crop_pad = cfg.crop_pad;
  return policy;
}

TrainConfig train_config_for(const PhaseConfig& phase,
                             const AugmentPolicy& policy, uint64_t seed) {
  TrainConfig t;
  t.epochs = phase.epochs;
  t.lr = phase.lr;
  t.momentum = phase.momentum;
  t.weight_decay = phase.weight_decay;
  t.batch_size = phase.batch_size;
  t.policy = policy;
  t.seed = seed;
  return t;
}

// Fixed per-sample augmentation pass used when eval.augmented is set; draws
// come from epoch 0 of the dataset seed so the copy is run-independent.
Dataset augment_copy(const Dataset& data, const AugmentPolicy& policy,
                     uint64_t seed) {
  Dataset out = data;
  for (int i = 0; i < data.n; ++i) {
    Image im = Image::from(data.image(i), data.c, data.h, data.w);
    apply_policy(policy, im, i, 0, seed);
    std::copy(im.v.begin(), im.v.end(),
              out.images.begin() + static_cast<int64_t>(i) * data.image_size());
  }
  return out;
}

struct GridData {
  Dataset train;
  Dataset test;
};

GridData load_grid_data(const ExperimentConfig& cfg) {
  const DatasetSpec& d = cfg.dataset;
  if (d.kind == "synthetic") {
    return {make_synthetic(d.classes, d.per_class, d.channels, d.height,
                           d.width, d.seed, "train", d.noise_sigma, d.contrast,
                           d.hard_fraction),
            make_synthetic(d.classes, d.per_class, d.channels, d.height,
                           d.width, d.seed, "test", d.noise_sigma, d.contrast,
                           d.hard_fraction)};
  }
  const CifarVariant variant =
      d.kind == "cifar10" ? CifarVariant::cifar10 : CifarVariant::cifar100;
  auto [train, test] = load_cifar(d.path, variant);
  return {std::move(train), std::move(test)};
}

StageState& stage_slot(RunManifest& manifest, const std::string& key) {
  return manifest.stages[key];
}

void record_failure(RunManifest& manifest, const std::string& key,
                    const std::exception& e) {
  StageState& st = stage_slot(manifest, key);
  st.status = "failed";
  st.checkpoint.clear();
  st.metrics.clear();
  st.error = e.what();
  ++manifest.failures;
}

}  // namespace

std::string policy_slug(const std::string& policy) {
  std::string slug;
  for (char ch : policy) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      slug.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(ch))));
    else
      slug.push_back('-');
  }
  return slug;
}

std::string forget_slug(ForgetMode mode, double parameter) {
  char buf[48];
  if (mode == ForgetMode::random) {
    std::snprintf(buf, sizeof(buf), "random-%.4f", parameter);
  } else {
    std::snprintf(buf, sizeof(buf), "classwise-%lld",
                  static_cast<long long>(std::llround(parameter)));
  }
  return buf;
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["config_hash"] = manifest.config_hash;
  j["failures"] = manifest.failures;
  j["reports"] = manifest.reports;
  nlohmann::ordered_json stages = nlohmann::ordered_json::object();
  for (const auto& [key, st] : manifest.stages) {
    nlohmann::ordered_json s;
    s["status"] = st.status;
    s["checkpoint"] = st.checkpoint;
    s["metrics"] = st.metrics;
    s["error"] = st.error;
    stages[key] = std::move(s);
  }
  j["stages"] = std::move(stages);
  atomic_write(path, j.dump(2) + "\n");
}

RunManifest load_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw FormatError(path + ": expected a JSON object");
  try {
    if (j.at("schema").get<int>() != 1)
      throw FormatError(path + ": unsupported manifest schema");
    RunManifest manifest;
    manifest.config_hash = j.at("config_hash").get<std::string>();
    manifest.failures = j.at("failures").get<int>();
    for (const auto& r : j.at("reports"))
      manifest.reports.push_back(r.get<std::string>());
    for (const auto& [key, s] : j.at("stages").items()) {
      StageState st;
      st.status = s.at("status").get<std::string>();
      st.checkpoint = s.at("checkpoint").get<std::string>();
      st.metrics = s.at("metrics").get<std::string>();
      st.error = s.at("error").get<std::string>();
      manifest.stages[key] = std::move(st);
    }
    return manifest;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": malformed manifest: " + e.what());
  }
}

RunManifest run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::string hash = hex16(config_hash(cfg));
  const fs::path out_dir = cfg.output_dir;
  const fs::path cache = out_dir / "cache" / hash;
  fs::create_directories(cache / "checkpoints");
  fs::create_directories(cache / "metrics");
  atomic_write(cache / "config.json", dump_config(cfg).dump(2) + "\n");

  RunManifest manifest;
  manifest.config_hash = hash;

  GridData data = load_grid_data(cfg);
  const ArchSpec arch = arch_for(cfg, data.train);

  // Retrain references and unlearned records per (policy, forget) group,
  // keyed by seed for per-seed pairing.
  using SeedMetrics = std::map<uint64_t, MetricsRecord>;
  std::map<std::string, SeedMetrics> retrain_recs;
  std::map<std::string, SeedMetrics> unlearn_recs;

  const std::string gap_mode = gap_mode_name(cfg.gap_mode);

  auto eval_model = [&](Model& m, const ForgetPartition& part,
                        const Dataset& acc_train, const Dataset& acc_test,
                        const std::string& method, const std::string& policy,
                        uint64_t seed) {
    MetricsRecord rec;
    rec.method = method;
    rec.policy = policy;
    rec.seed = seed;
    const CoreAccuracies acc = core_accuracies(m, part, acc_train, acc_test);
    rec.ua = acc.ua;
    rec.ra = acc.ra;
    rec.ta = acc.ta;
    const MiaAttacker attacker =
        fit_mia_attacker(m, part, data.train, data.test, seed);
    rec.mia = mia_score(m, part, data.train, attacker);
    return rec;
  };

  for (const std::string& policy_name : cfg.policies) {
    const AugmentPolicy policy = policy_for(cfg, policy_name);
    const std::string pslug = policy_slug(policy_name);

    // Accuracy metrics optionally come from augmented copies; membership
    // confidences always come from the clean data.
    const Dataset* acc_train = &data.train;
    const Dataset* acc_test = &data.test;
    Dataset aug_train, aug_test;
    if (cfg.eval_augmented) {
      aug_train = augment_copy(data.train, policy, cfg.dataset.seed);
      aug_test = augment_copy(data.test, policy, cfg.dataset.seed);
      acc_train = &aug_train;
      acc_test = &aug_test;
    }

    for (uint64_t seed : cfg.seeds) {
      const std::string okey = "theta_o-" + pslug + "-s" + std::to_string(seed);
      const fs::path ockpt = cache / "checkpoints" / (okey + ".ckpt");
      Model origin;
      try {
        if (fs::exists(ockpt)) {
          origin = load_model(ockpt.string());
        } else {
          origin = train(arch, data.train,
                         train_config_for(cfg.baseline, policy, seed));
          save_model(origin, ockpt.string());
        }
        StageState& st = stage_slot(manifest, okey);
        st.status = "done";
        st.checkpoint = fs::relative(ockpt, out_dir).generic_string();
      } catch (const std::exception& e) {
        record_failure(manifest, okey, e);
        continue;
      }

      for (double param : cfg.forget.parameters) {
        const std::string fslug = forget_slug(cfg.forget.mode, param);
        const std::string group = pslug + "-" + fslug;
        const ForgetPartition part =
            split_forget(data.train, cfg.forget.mode, param, seed);

        const std::string rkey = "theta_r-" + group + "-s" + std::to_string(seed);
        const fs::path rckpt = cache / "checkpoints" / (rkey + ".ckpt");
        const fs::path rmet = cache / "metrics" / (rkey + ".json");
        try {
          std::optional<MetricsRecord> rec;
          if (fs::exists(rckpt)) rec = try_load_metrics(rmet);
          if (!rec) {
            Model retrained;
            const double rte = measure_rte_minutes([&] {
              retrained = retrain(arch, data.train, part,
                                  train_config_for(cfg.baseline, policy, seed));
            });
            rec = eval_model(retrained, part, *acc_train, *acc_test, "retrain",
                             policy_name, seed);
            rec->rte = rte;
            save_model(retrained, rckpt.string());
            atomic_write(rmet, metrics_to_json(*rec).dump(2) + "\n");
          }
          retrain_recs[group][seed] = *rec;
          StageState& st = stage_slot(manifest, rkey);
          st.status = "done";
          st.checkpoint = fs::relative(rckpt, out_dir).generic_string();
          st.metrics = fs::relative(rmet, out_dir).generic_string();
        } catch (const std::exception& e) {
          record_failure(manifest, rkey, e);
        }

        for (const std::string& method : cfg.methods) {
          const std::string ukey =
              "theta_u-" + method + "-" + group + "-s" + std::to_string(seed);
          const fs::path uckpt = cache / "checkpoints" / (ukey + ".ckpt");
          const fs::path umet = cache / "metrics" / (ukey + ".json");
          try {
            std::optional<MetricsRecord> rec;
            if (fs::exists(uckpt)) rec = try_load_metrics(umet);
            if (!rec) {
              const TrainConfig tcfg =
                  train_config_for(cfg.unlearn, policy, seed);
              Model unlearned;
              const double rte = measure_rte_minutes([&] {
                if (method == "fine-tune") {
                  unlearned = fine_tune(origin, data.train, part, tcfg);
                } else if (method == "random-label") {
                  unlearned = random_label(origin, data.train, part, tcfg);
                } else {
                  Model probe = origin;
                  const SaliencyMask mask = compute_saliency_mask(
                      probe, data.train, part, cfg.salun_k, tcfg.batch_size);
                  unlearned = salun(origin, data.train, part, mask, tcfg);
                }
              });
              rec = eval_model(unlearned, part, *acc_train, *acc_test, method,
                               policy_name, seed);
              rec->rte = rte;
              save_model(unlearned, uckpt.string());
              atomic_write(umet, metrics_to_json(*rec).dump(2) + "\n");
            }
            unlearn_recs[method + "-" + group][seed] = *rec;
            StageState& st = stage_slot(manifest, ukey);
            st.status = "done";
            st.checkpoint = fs::relative(uckpt, out_dir).generic_string();
            st.metrics = fs::relative(umet, out_dir).generic_string();
          } catch (const std::exception& e) {
            record_failure(manifest, ukey, e);
          }
        }
      }
    }
  }

  // Rows: retrain references carry zero gaps; unlearned rows carry per-seed
  // |difference| gaps or the group-level of-means gap.
  std::vector<ReportRow> rows;
  auto base_row = [&](const MetricsRecord& rec, double param) {
    ReportRow row;
    row.dataset = cfg.dataset.kind;
    row.method = rec.method;
    row.policy = rec.policy;
    row.forget_mode =
        cfg.forget.mode == ForgetMode::random ? "random" : "classwise";
    row.forget_parameter = param;
    row.seed = rec.seed;
    row.ua = rec.ua;
    row.ra = rec.ra;
    row.ta = rec.ta;
    row.mia = rec.mia;
    row.rte = rec.rte;
    row.gap_mode = gap_mode;
    return row;
  };

  for (const std::string& policy_name : cfg.policies) {
    const std::string pslug = policy_slug(policy_name);
    for (double param : cfg.forget.parameters) {
      const std::string group = pslug + "-" + forget_slug(cfg.forget.mode, param);
      const auto rit = retrain_recs.find(group);
      const SeedMetrics* refs = rit == retrain_recs.end() ? nullptr : &rit->second;

      if (refs)
        for (const auto& [seed, rec] : *refs) rows.push_back(base_row(rec, param));

      for (const std::string& method : cfg.methods) {
        const auto uit = unlearn_recs.find(method + "-" + group);
        if (uit == unlearn_recs.end()) continue;

        GapRecord group_gap;
        bool have_group_gap = false;
        if (cfg.gap_mode == GapMode::of_means && refs && !refs->empty() &&
            !uit->second.empty()) {
          std::vector<MetricsRecord> unlearned, retrained;
          for (const auto& [seed, rec] : uit->second) unlearned.push_back(rec);
          for (const auto& [seed, rec] : *refs) retrained.push_back(rec);
          group_gap = metric_gap(unlearned, retrained, GapMode::of_means);
          have_group_gap = true;
        }

        for (const auto& [seed, rec] : uit->second) {
          ReportRow row = base_row(rec, param);
          if (cfg.gap_mode == GapMode::per_seed) {
            if (refs && refs->count(seed)) {
              const MetricsRecord& ref = refs->at(seed);
              row.gap_ua = std::fabs(rec.ua - ref.ua);
              row.gap_ra = std::fabs(rec.ra - ref.ra);
              row.gap_ta = std::fabs(rec.ta - ref.ta);
              row.gap_mia = std::fabs(rec.mia - ref.mia);
              row.ag = (row.gap_ua + row.gap_ra + row.gap_ta + row.gap_mia) / 4.0;
            }
          } else if (have_group_gap) {
            row.gap_ua = group_gap.ua;
            row.gap_ra = group_gap.ra;
            row.gap_ta = group_gap.ta;
            row.gap_mia = group_gap.mia;
            row.ag = average_gap(group_gap);
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }

  if (!rows.empty()) {
    atomic_write(out_dir / "report.csv", report_to_csv(rows));
    atomic_write(out_dir / "report.json", report_to_json(rows).dump(2) + "\n");
    atomic_write(out_dir / "aggregate.csv", aggregate_to_csv(rows));
    manifest.reports = {"report.csv", "report.json", "aggregate.csv"};
  }
  save_manifest(manifest, (out_dir / "manifest.json").string());
  return manifest;
}

int verify_run(const std::string& manifest_path, std::ostream& out) {
  const RunManifest manifest = load_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  int problems = 0;

  int failed_stages = 0;
  for (const auto& [key, st] : manifest.stages) {
    if (st.status == "failed") {
      out << "stage " << key << ": recorded failure: " << st.error << "\n";
      ++problems;
      ++failed_stages;
      continue;
    }
    if (st.status != "done") {
      out << "stage " << key << ": unknown status '" << st.status << "'\n";
      ++problems;
      continue;
    }
    if (st.checkpoint.empty()) {
      out << "stage " << key << ": no checkpoint recorded\n";
      ++problems;
    } else {
      try {
        load_model((base / st.checkpoint).string());
      } catch (const std::exception& e) {
        out << "stage " << key << ": checkpoint unreadable: " << e.what()
            << "\n";
        ++problems;
      }
    }
    if (!st.metrics.empty() && !try_load_metrics(base / st.metrics)) {
      out << "stage " << key << ": metrics unreadable: " << st.metrics << "\n";
      ++problems;
    }
  }
  if (failed_stages != manifest.failures) {
    out << "manifest: failure count " << manifest.failures
        << " does not match " << failed_stages << " failed stages\n";
    ++problems;
  }
  for (const std::string& report : manifest.reports) {
    if (!fs::is_regular_file(base / report)) {
      out << "report " << report << ": missing\n";
      ++problems;
    }
  }
  return problems;
}

}  // namespace mulab
