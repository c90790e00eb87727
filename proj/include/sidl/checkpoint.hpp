#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sidl/tensor.hpp"

namespace sidl {

// Checkpoint container: magic "SIDL", u16 version, named sections
// (length-prefixed name, shape, little-endian f64 payload), trailing
// 64-bit FNV-1a checksum over everything before it.
struct Checkpoint {
  std::map<std::string, Tensor> sections;

  void put(const std::string& name, const Tensor& t);
  const Tensor& get(const std::string& name) const;
  bool has(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// FNV-1a of a whole file's bytes (manifest chaining).
std::uint64_t file_checksum(const std::string& path);

}  // namespace sidl
