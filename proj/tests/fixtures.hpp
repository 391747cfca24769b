#pragma once

// Hand-written CIFAR-format fixtures shared by unit and acceptance tests.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace testutil {

// Two CIFAR-10 records with fully determined bytes: labels 3 and 9, pixel
// byte j of record r equal to (j*mult_r + add_r) mod 256.
inline std::vector<uint8_t> cifar10_fixture_bytes() {
  std::vector<uint8_t> bytes;
  bytes.reserve(2 * 3073);
  bytes.push_back(3);
  for (int j = 0; j < 3072; ++j) bytes.push_back(static_cast<uint8_t>(j % 256));
  bytes.push_back(9);
  for (int j = 0; j < 3072; ++j)
    bytes.push_back(static_cast<uint8_t>((j * 3 + 5) % 256));
  return bytes;
}

// Two CIFAR-100 records: (coarse 11, fine 42) and (coarse 0, fine 99).
inline std::vector<uint8_t> cifar100_fixture_bytes() {
  std::vector<uint8_t> bytes;
  bytes.reserve(2 * 3074);
  bytes.push_back(11);
  bytes.push_back(42);
  for (int j = 0; j < 3072; ++j)
    bytes.push_back(static_cast<uint8_t>((j * 5 + 1) % 256));
  bytes.push_back(0);
  bytes.push_back(99);
  for (int j = 0; j < 3072; ++j)
    bytes.push_back(static_cast<uint8_t>((255 - j) % 256));
  return bytes;
}

inline void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace testutil
