#include "wiretap/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace wiretap {
namespace {

constexpr char kMagic[8] = {'W', 'T', 'C', 'K', 'P', 'T', '\0', '\0'};

template <typename T>
void PutLe(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void PutString(std::string& out, const std::string& s) {
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T Le() {
    Need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  std::string String() {
    const auto n = Le<std::uint32_t>();
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void Expect(const char* data, std::size_t n) {
    Need(n);
    if (std::memcmp(bytes_.data() + pos_, data, n) != 0) {
      throw CheckpointError("not a wiretap checkpoint (bad magic)");
    }
    pos_ += n;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw CheckpointError("truncated checkpoint");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, sizeof(kMagic));
  PutLe<std::uint32_t>(out, kCheckpointVersion);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    PutString(out, k);
    PutString(out, v);
  }
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    PutString(out, name);
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) PutLe<std::uint64_t>(out, d);
    for (double v : t.values()) PutLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  r.Expect(kMagic, sizeof(kMagic));
  const auto version = r.Le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) +
                          " unsupported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint ckpt;
  const auto meta = r.Le<std::uint32_t>();
  for (std::uint32_t i = 0; i < meta; ++i) {
    std::string k = r.String();
    ckpt.metadata[k] = r.String();
  }
  const auto count = r.Le<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.String();
    const auto rank = r.Le<std::uint32_t>();
    if (rank == 0 || rank > 8) throw CheckpointError("bad tensor rank in '" + name + "'");
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(r.Le<std::uint64_t>());
      if (d == 0 || d > (std::size_t{1} << 32)) {
        throw CheckpointError("bad tensor dimension in '" + name + "'");
      }
      total *= d;
    }
    if (total > bytes.size()) throw CheckpointError("truncated checkpoint");
    std::vector<double> values(total);
    for (auto& v : values) v = std::bit_cast<double>(r.Le<std::uint64_t>());
    ckpt.tensors.emplace(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  if (!r.done()) throw CheckpointError("trailing bytes after checkpoint");
  return ckpt;
}

void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  WriteFileAtomic(path, SerializeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return DeserializeCheckpoint(ReadFileBytes(path));
}

}  // namespace wiretap
