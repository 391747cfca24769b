#include "mulab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mulab/augment.hpp"
#include "mulab/errors.hpp"
#include "mulab/models.hpp"
#include "mulab/rng.hpp"

namespace mulab {

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names = {"fine-tune", "random-label",
                                                 "salun"};
  return names;
}

namespace {

// Tracks which keys a parse consumed so leftovers can be reported by name.
struct FlatReader {
  const nlohmann::json& j;
  std::set<std::string> seen;

  const nlohmann::json* find(const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) return nullptr;
    seen.insert(key);
    return &*it;
  }

  std::string get_string(const std::string& key, std::string fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw SchemaError(key + ": expected a string");
    return v->get<std::string>();
  }

  int get_int(const std::string& key, int fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer())
      throw SchemaError(key + ": expected an integer");
    return v->get<int>();
  }

  uint64_t get_uint(const std::string& key, uint64_t fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer() ||
        (!v->is_number_unsigned() && v->get<int64_t>() < 0))
      throw SchemaError(key + ": expected a nonnegative integer");
    return v->get<uint64_t>();
  }

  double get_double(const std::string& key, double fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw SchemaError(key + ": expected a number");
    return v->get<double>();
  }

  bool get_bool(const std::string& key, bool fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw SchemaError(key + ": expected a boolean");
    return v->get<bool>();
  }

  std::vector<std::string> get_strings(const std::string& key,
                                       std::vector<std::string> fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) throw SchemaError(key + ": expected an array");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string())
        throw SchemaError(key + ": expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::vector<double> get_doubles(const std::string& key,
                                  std::vector<double> fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) throw SchemaError(key + ": expected an array");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number())
        throw SchemaError(key + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<uint64_t> get_uints(const std::string& key,
                                  std::vector<uint64_t> fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) throw SchemaError(key + ": expected an array");
    std::vector<uint64_t> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer() ||
          (!e.is_number_unsigned() && e.get<int64_t>() < 0))
        throw SchemaError(key +
                          ": expected an array of nonnegative integers");
      out.push_back(e.get<uint64_t>());
    }
    return out;
  }
};

PhaseConfig read_phase(FlatReader& r, const std::string& prefix,
                       const PhaseConfig& defaults) {
  PhaseConfig phase;
  phase.epochs = r.get_int(prefix + ".epochs", defaults.epochs);
  phase.lr = r.get_double(prefix + ".lr", defaults.lr);
  phase.momentum = r.get_double(prefix + ".momentum", defaults.momentum);
  phase.weight_decay =
      r.get_double(prefix + ".weight_decay", defaults.weight_decay);
  phase.batch_size = r.get_int(prefix + ".batch_size", defaults.batch_size);
  return phase;
}

void validate_phase(const PhaseConfig& phase, const std::string& prefix) {
  if (phase.epochs < 0) throw SchemaError(prefix + ".epochs: must be >= 0");
  if (!(phase.lr > 0.0) || !std::isfinite(phase.lr))
    throw SchemaError(prefix + ".lr: must be > 0");
  if (!(phase.momentum >= 0.0) || !std::isfinite(phase.momentum))
    throw SchemaError(prefix + ".momentum: must be >= 0");
  if (!(phase.weight_decay >= 0.0) || !std::isfinite(phase.weight_decay))
    throw SchemaError(prefix + ".weight_decay: must be >= 0");
  if (phase.batch_size < 1)
    throw SchemaError(prefix + ".batch_size: must be >= 1");
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& flat) {
  if (!flat.is_object()) throw SchemaError("config: expected a JSON object");
  FlatReader r{flat, {}};

  const nlohmann::json* schema = r.find("schema");
  if (!schema) throw SchemaError("schema: missing");
  if (!schema->is_number_integer() || schema->get<int>() != 1)
    throw SchemaError("schema: expected 1");

  ExperimentConfig cfg;
  cfg.name = r.get_string("name", cfg.name);
  cfg.dataset.kind = r.get_string("dataset.kind", cfg.dataset.kind);
  cfg.dataset.path = r.get_string("dataset.path", cfg.dataset.path);
  cfg.dataset.classes = r.get_int("dataset.classes", cfg.dataset.classes);
  cfg.dataset.per_class =
      r.get_int("dataset.per_class", cfg.dataset.per_class);
  cfg.dataset.channels = r.get_int("dataset.channels", cfg.dataset.channels);
  cfg.dataset.height = r.get_int("dataset.height", cfg.dataset.height);
  cfg.dataset.width = r.get_int("dataset.width", cfg.dataset.width);
  cfg.dataset.noise_sigma =
      r.get_double("dataset.noise_sigma", cfg.dataset.noise_sigma);
  cfg.dataset.contrast =
      r.get_double("dataset.contrast", cfg.dataset.contrast);
  cfg.dataset.hard_fraction =
      r.get_double("dataset.hard_fraction", cfg.dataset.hard_fraction);
  cfg.dataset.seed = r.get_uint("dataset.seed", cfg.dataset.seed);
  cfg.arch_kind = r.get_string("arch.kind", cfg.arch_kind);
  cfg.arch_width = r.get_int("arch.width", cfg.arch_width);
  cfg.baseline = read_phase(r, "baseline", cfg.baseline);
  cfg.unlearn = read_phase(r, "unlearn", cfg.unlearn);
  cfg.methods = r.get_strings("methods", cfg.methods);
  cfg.policies = r.get_strings("policies", cfg.policies);
  const std::string mode = r.get_string(
      "forget.mode", cfg.forget.mode == ForgetMode::random ? "random"
                                                           : "classwise");
  if (mode == "random")
    cfg.forget.mode = ForgetMode::random;
  else if (mode == "classwise")
    cfg.forget.mode = ForgetMode::classwise;
  else
    throw SchemaError("forget.mode: expected random or classwise");
  cfg.forget.parameters =
      r.get_doubles("forget.parameters", cfg.forget.parameters);
  cfg.seeds = r.get_uints("seeds", cfg.seeds);
  cfg.output_dir = r.get_string("output_dir", cfg.output_dir);
  const std::string gap =
      r.get_string("gap_mode", gap_mode_name(cfg.gap_mode));
  try {
    cfg.gap_mode = gap_mode_from_name(gap);
  } catch (const InputError&) {
    throw SchemaError("gap_mode: expected per-seed or of-means");
  }
  cfg.salun_k = r.get_double("salun.k", cfg.salun_k);
  cfg.crop_pad = r.get_int("augment.crop_pad", cfg.crop_pad);
  cfg.eval_augmented = r.get_bool("eval.augmented", cfg.eval_augmented);

  for (const auto& [key, value] : flat.items())
    if (!r.seen.count(key)) throw SchemaError("unknown config key: " + key);

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

nlohmann::json dump_config(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema"] = 1;
  j["name"] = cfg.name;
  j["dataset.kind"] = cfg.dataset.kind;
  j["dataset.path"] = cfg.dataset.path;
  j["dataset.classes"] = cfg.dataset.classes;
  j["dataset.per_class"] = cfg.dataset.per_class;
  j["dataset.channels"] = cfg.dataset.channels;
  j["dataset.height"] = cfg.dataset.height;
  j["dataset.width"] = cfg.dataset.width;
  j["dataset.noise_sigma"] = cfg.dataset.noise_sigma;
  j["dataset.contrast"] = cfg.dataset.contrast;
  j["dataset.hard_fraction"] = cfg.dataset.hard_fraction;
  j["dataset.seed"] = cfg.dataset.seed;
  j["arch.kind"] = cfg.arch_kind;
  j["arch.width"] = cfg.arch_width;
  j["baseline.epochs"] = cfg.baseline.epochs;
  j["baseline.lr"] = cfg.baseline.lr;
  j["baseline.momentum"] = cfg.baseline.momentum;
  j["baseline.weight_decay"] = cfg.baseline.weight_decay;
  j["baseline.batch_size"] = cfg.baseline.batch_size;
  j["unlearn.epochs"] = cfg.unlearn.epochs;
  j["unlearn.lr"] = cfg.unlearn.lr;
  j["unlearn.momentum"] = cfg.unlearn.momentum;
  j["unlearn.weight_decay"] = cfg.unlearn.weight_decay;
  j["unlearn.batch_size"] = cfg.unlearn.batch_size;
  j["methods"] = cfg.methods;
  j["policies"] = cfg.policies;
  j["forget.mode"] =
      cfg.forget.mode == ForgetMode::random ? "random" : "classwise";
  j["forget.parameters"] = cfg.forget.parameters;
  j["seeds"] = cfg.seeds;
  j["output_dir"] = cfg.output_dir;
  j["gap_mode"] = gap_mode_name(cfg.gap_mode);
  j["salun.k"] = cfg.salun_k;
  j["augment.crop_pad"] = cfg.crop_pad;
  j["eval.augmented"] = cfg.eval_augmented;
  return j;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << dump_config(cfg).dump(2) << "\n";
  if (!out) throw IoError("failed writing config file: " + path);
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  return rng::hash_name(dump_config(cfg).dump());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.name.empty()) throw SchemaError("name: must not be empty");
  if (cfg.dataset.kind != "synthetic" && cfg.dataset.kind != "cifar10" &&
      cfg.dataset.kind != "cifar100")
    throw SchemaError("dataset.kind: expected synthetic, cifar10 or cifar100");
  if (cfg.dataset.kind == "synthetic") {
    if (cfg.dataset.classes < 2)
      throw SchemaError("dataset.classes: must be >= 2");
    if (cfg.dataset.per_class < 1)
      throw SchemaError("dataset.per_class: must be >= 1");
    if (cfg.dataset.channels < 1 || cfg.dataset.height < 1 ||
        cfg.dataset.width < 1)
      throw SchemaError("dataset dimensions: must be >= 1");
    if (!(cfg.dataset.noise_sigma >= 0.0))
      throw SchemaError("dataset.noise_sigma: must be >= 0");
    if (!(cfg.dataset.contrast > 0.0))
      throw SchemaError("dataset.contrast: must be > 0");
    if (!(cfg.dataset.hard_fraction >= 0.0 && cfg.dataset.hard_fraction <= 1.0))
      throw SchemaError("dataset.hard_fraction: must be in [0, 1]");
  } else if (cfg.dataset.path.empty()) {
    throw SchemaError("dataset.path: must not be empty");
  }
  try {
    arch_kind_from_name(cfg.arch_kind);
  } catch (const InputError&) {
    throw SchemaError("arch.kind: expected tiny-resnet or mlp");
  }
  if (cfg.arch_width < 1) throw SchemaError("arch.width: must be >= 1");
  validate_phase(cfg.baseline, "baseline");
  validate_phase(cfg.unlearn, "unlearn");
  if (cfg.methods.empty()) throw SchemaError("methods: must not be empty");
  for (const auto& m : cfg.methods) {
    const auto& known = known_methods();
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw SchemaError("methods: unknown method '" + m + "'");
  }
  if (cfg.policies.empty()) throw SchemaError("policies: must not be empty");
  for (const auto& p : cfg.policies) {
    try {
      scenario_from_name(p);
    } catch (const InputError&) {
      throw SchemaError("policies: unknown policy '" + p + "'");
    }
  }
  if (cfg.forget.parameters.empty())
    throw SchemaError("forget.parameters: must not be empty");
  for (double param : cfg.forget.parameters) {
    if (cfg.forget.mode == ForgetMode::random) {
      if (!(param > 0.0 && param < 1.0))
        throw SchemaError("forget.parameters: rates must be in (0, 1)");
    } else {
      if (!(param >= 0.0) || param != std::floor(param))
        throw SchemaError(
            "forget.parameters: class ids must be nonnegative integers");
    }
  }
  if (cfg.seeds.empty()) throw SchemaError("seeds: must not be empty");
  if (cfg.output_dir.empty())
    throw SchemaError("output_dir: must not be empty");
  if (!(cfg.salun_k > 0.0 && cfg.salun_k <= 1.0))
    throw SchemaError("salun.k: must be in (0, 1]");
  if (cfg.crop_pad < 0) throw SchemaError("augment.crop_pad: must be >= 0");
}

ExperimentConfig preset(const std::string& name) {
  if (name == "desk") {
    ExperimentConfig cfg;
    return cfg;
  }
  if (name == "paper-cifar10" || name == "paper-cifar100") {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.dataset.kind = name == "paper-cifar10" ? "cifar10" : "cifar100";
    cfg.dataset.path =
        name == "paper-cifar10" ? "data/cifar10" : "data/cifar100";
    cfg.dataset.classes = name == "paper-cifar10" ? 10 : 100;
    cfg.dataset.per_class = name == "paper-cifar10" ? 5000 : 500;
    cfg.dataset.height = 32;
    cfg.dataset.width = 32;
    cfg.dataset.hard_fraction = 0.0;
    cfg.arch_kind = "tiny-resnet";
    cfg.arch_width = 1;
    cfg.baseline = {200, 0.1, 0.9, 5e-4, 256};
    cfg.unlearn = {10, 0.01, 0.9, 5e-4, 256};
    cfg.crop_pad = 4;
    cfg.methods = known_methods();
    cfg.policies.clear();
    for (Scenario s : all_scenarios)
      cfg.policies.push_back(scenario_name(s));
    cfg.forget.mode = ForgetMode::random;
    cfg.forget.parameters = {0.10, 0.50};
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.output_dir = "runs/" + name;
    return cfg;
  }
  throw InputError("unknown preset: " + name);
}

}  // namespace mulab
