#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mulab/config.hpp"
#include "mulab/report.hpp"

namespace mulab {

// One trained, retrained, or unlearned model in a grid run.
struct StageState {
  std::string status;      // "done" or "failed"
  std::string checkpoint;  // relative to the output dir, empty if none
  std::string metrics;     // relative to the output dir, empty if none
  std::string error;       // failure reason when status == "failed"
};

// What a grid run produced. Serialized as manifest.json in the output dir;
// contains no timestamps, so a cached rerun writes identical bytes.
struct RunManifest {
  std::string config_hash;  // 16 hex digits
  std::map<std::string, StageState> stages;
  std::vector<std::string> reports;  // relative to the output dir
  int failures = 0;
};

// Filename-safe policy and forget-spec fragments for stage keys.
std::string policy_slug(const std::string& policy);
std::string forget_slug(ForgetMode mode, double parameter);

void save_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

// Runs the (policy x seed x forget x method) grid described by cfg.
//
// Artifact layout under cfg.output_dir:
//   manifest.json, report.csv, report.json, aggregate.csv
//   cache/<hash>/config.json
//   cache/<hash>/checkpoints/<stage>.ckpt
//   cache/<hash>/metrics/<stage>.json
//
// The cache directory is keyed by the config hash, so runs of different
// configurations never share artifacts. A stage whose checkpoint (and, where
// applicable, metrics file) already exists is reused instead of recomputed;
// stored metrics keep the originally measured RTE, which makes a cached
// rerun reproduce the reports byte for byte. A fresh run re-measures RTE;
// every other report column is bit-reproducible from the config alone.
//
// One baseline model is trained per (policy, seed) and shared by every
// method and forget spec. The retrain reference is trained per
// (policy, forget, seed) with the same augmentation policy. Per-seed gap
// rows carry that seed's |unlearned - retrained| metric differences;
// of-means rows repeat the group-level |mean - mean| gap. Retrain rows
// report zero gaps. With eval.augmented set, UA/RA/TA are measured on
// policy-augmented copies of the data (epoch-0 draws keyed by the dataset
// seed); the MIA always works on clean confidences.
//
// A stage that throws is recorded as failed and the rest of the grid
// continues; rows whose retrain reference is missing keep zero gaps.
RunManifest run_experiment(const ExperimentConfig& cfg);

// Re-checks the artifacts a manifest points at: checkpoints load, metrics
// parse and carry the expected keys, report files exist. Prints one line per
// problem to out and returns the problem count.
int verify_run(const std::string& manifest_path, std::ostream& out);

}  // namespace mulab
