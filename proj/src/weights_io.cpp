#include "depthbench/nn/weights.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <vector>

namespace depthbench::nn {

namespace {

constexpr char kMagic[4] = {'D', 'B', 'W', '1'};
constexpr std::uint8_t kDtypeFloat32 = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    const auto* p = take(2);
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32() {
    const auto* p = take(4);
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
  }
  std::string str(std::size_t n) {
    const auto* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  void floats(float* dst, std::size_t count) {
    const auto* p = take(4 * count);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t bits = static_cast<std::uint32_t>(p[4 * i]) |
                           (static_cast<std::uint32_t>(p[4 * i + 1]) << 8) |
                           (static_cast<std::uint32_t>(p[4 * i + 2]) << 16) |
                           (static_cast<std::uint32_t>(p[4 * i + 3]) << 24);
      std::memcpy(&dst[i], &bits, 4);
    }
  }
  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return size_ - offset_; }

 private:
  const std::uint8_t* take(std::size_t n) {
    if (offset_ + n > size_) throw FormatError("weight file truncated");
    const auto* p = data_ + offset_;
    offset_ += n;
    return p;
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t offset_ = 0;
};

}  // namespace

WeightStore load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open weight file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("not a DBW1 weight file: " + path.string());

  const std::size_t crc_offset = bytes.size() - 4;
  Reader crc_reader(bytes.data() + crc_offset, 4);
  const std::uint32_t stored_crc = crc_reader.u32();
  const std::uint32_t actual_crc = static_cast<std::uint32_t>(
      crc32(0, bytes.data() + 4, static_cast<uInt>(crc_offset - 4)));
  if (stored_crc != actual_crc) throw FormatError("weight file CRC mismatch");

  Reader r(bytes.data() + 4, crc_offset - 4);
  const std::uint32_t count = r.u32();
  WeightStore store;
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint16_t name_len = r.u16();
    const std::string name = r.str(name_len);
    const std::uint8_t dtype = r.u8();
    if (dtype != kDtypeFloat32)
      throw FormatError("unsupported dtype in tensor '" + name + "'");
    const std::uint8_t rank = r.u8();
    std::vector<Eigen::Index> shape(rank);
    for (std::uint8_t a = 0; a < rank; ++a)
      shape[a] = static_cast<Eigen::Index>(r.u32());
    TensorF tensor(shape);
    r.floats(tensor.data(), static_cast<std::size_t>(tensor.size()));
    store.add(name, std::move(tensor));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in weight file");
  return store;
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  std::vector<std::uint8_t> body;
  put_u32(body, static_cast<std::uint32_t>(store.tensors().size()));
  for (const auto& [name, tensor] : store.tensors()) {
    if (name.size() > 0xffff) throw FormatError("tensor name too long");
    put_u16(body, static_cast<std::uint16_t>(name.size()));
    body.insert(body.end(), name.begin(), name.end());
    body.push_back(kDtypeFloat32);
    body.push_back(static_cast<std::uint8_t>(tensor.rank()));
    for (Eigen::Index a = 0; a < tensor.rank(); ++a)
      put_u32(body, static_cast<std::uint32_t>(tensor.extent(a)));
    for (Eigen::Index i = 0; i < tensor.size(); ++i) {
      std::uint32_t bits;
      const float v = tensor[i];
      std::memcpy(&bits, &v, 4);
      put_u32(body, bits);
    }
  }
  const std::uint32_t crc =
      static_cast<std::uint32_t>(crc32(0, body.data(), static_cast<uInt>(body.size())));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write weight file: " + path.string());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(body.data()),
            static_cast<std::streamsize>(body.size()));
  std::vector<std::uint8_t> tail;
  put_u32(tail, crc);
  out.write(reinterpret_cast<const char*>(tail.data()), 4);
  if (!out) throw FormatError("short write to weight file: " + path.string());
}

}  // namespace depthbench::nn
