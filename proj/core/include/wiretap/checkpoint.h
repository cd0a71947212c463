#ifndef WIRETAP_CHECKPOINT_H_
#define WIRETAP_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "wiretap/tensor.h"

namespace wiretap {

// Binary little-endian layout:
//   "WTCKPT\0\0" | u32 version
//   u32 metadata count, then (u32 len, key bytes, u32 len, value bytes)*
//   u32 tensor count, then (u32 len, name, u32 rank, u64 dims[rank],
//                           f64 values[prod(dims)])*
// Doubles are stored by bit pattern, so load(save(x)) == x exactly.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> metadata;
  std::map<std::string, Tensor> tensors;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint DeserializeCheckpoint(const std::string& bytes);

// Writes to "<path>.tmp" and renames over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& contents);
std::string ReadFileBytes(const std::filesystem::path& path);

}  // namespace wiretap

#endif  // WIRETAP_CHECKPOINT_H_
