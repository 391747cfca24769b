#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "mulab/tensor.hpp"

namespace mulab {

// Checkpoint file layout: 8-byte little-endian header length, JSON header,
// then a flat little-endian float32 stream. The header lists every tensor's
// name, shape, and byte offset into the stream, plus caller metadata.
struct Checkpoint {
  nlohmann::ordered_json meta;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors,
                     const nlohmann::ordered_json& meta);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace mulab
