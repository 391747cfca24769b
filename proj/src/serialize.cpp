#include "mulab/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "mulab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace mulab {

namespace {
constexpr const char* kFormat = "mulab-checkpoint-v1";
}

void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors,
                     const nlohmann::ordered_json& meta) {
  nlohmann::ordered_json header;
  header["format"] = kFormat;
  header["meta"] = meta;
  header["tensors"] = nlohmann::ordered_json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    nlohmann::ordered_json entry;
    entry["name"] = name;
    entry["shape"] = t->shape;
    entry["offset"] = offset;
    header["tensors"].push_back(entry);
    offset += static_cast<uint64_t>(t->v.size()) * sizeof(float);
  }
  const std::string head = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + tmp);
    const uint64_t head_len = head.size();
    out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto& [name, t] : tensors)
      out.write(reinterpret_cast<const char*>(t->v.data()),
                static_cast<std::streamsize>(t->v.size() * sizeof(float)));
    if (!out) throw IoError("short write on checkpoint: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path);
  uint64_t head_len = 0;
  in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
  if (!in || head_len == 0 || head_len > (1ull << 30))
    throw FormatError("bad checkpoint header length: " + path);
  std::string head(head_len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head_len));
  if (!in) throw FormatError("truncated checkpoint header: " + path);

  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(head);
  } catch (const nlohmann::json::exception&) {
    throw FormatError("checkpoint header is not valid JSON: " + path);
  }
  if (header.value("format", "") != kFormat)
    throw FormatError("unknown checkpoint format marker: " + path);

  std::vector<char> data(std::istreambuf_iterator<char>(in), {});
  Checkpoint cp;
  cp.meta = header.value("meta", nlohmann::ordered_json::object());
  for (const auto& entry : header["tensors"]) {
    const std::string name = entry.at("name").get<std::string>();
    const std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
    const uint64_t offset = entry.at("offset").get<uint64_t>();
    const uint64_t count = static_cast<uint64_t>(shape_numel(shape));
    if (offset + count * sizeof(float) > data.size())
      throw FormatError("checkpoint data truncated at tensor '" + name + "': " + path);
    std::vector<float> values(count);
    std::memcpy(values.data(), data.data() + offset, count * sizeof(float));
    cp.tensors.emplace_back(name, Tensor(shape, std::move(values)));
  }
  return cp;
}

}  // namespace mulab
