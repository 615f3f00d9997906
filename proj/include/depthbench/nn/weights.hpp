#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "depthbench/tensor.hpp"

namespace depthbench::nn {

// Named parameter tensors for a graph, keyed "<node_id>.<param>"
// (e.g. "stem.kernel", "stem.bias"). Stored as float32.
class WeightStore {
 public:
  void add(const std::string& name, TensorF tensor) {
    tensors_.insert_or_assign(name, std::move(tensor));
  }

  bool has(const std::string& name) const { return tensors_.count(name) != 0; }

  const TensorF& get(const std::string& name) const {
    const auto it = tensors_.find(name);
    if (it == tensors_.end())
      throw ValidationError("missing weight tensor '" + name + "'");
    return it->second;
  }

  std::map<std::string, TensorF>& tensors() { return tensors_; }
  const std::map<std::string, TensorF>& tensors() const { return tensors_; }

 private:
  std::map<std::string, TensorF> tensors_;
};

// DBW1 weight container: little-endian, sectioned, CRC-checked.
//
//   magic   "DBW1"
//   u32     tensor count
//   per tensor:
//     u16   name length, then name bytes
//     u8    dtype (1 = float32)
//     u8    rank
//     u32   extent per axis
//     f32   data, row-major
//   u32     CRC32 of everything between the magic and this field
WeightStore load_weights(const std::filesystem::path& path);
void save_weights(const WeightStore& store, const std::filesystem::path& path);

}  // namespace depthbench::nn
