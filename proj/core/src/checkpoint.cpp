#include "pdfevent/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "pdfevent/error.hpp"

namespace pdfevent::checkpoint {

namespace {

constexpr std::array<char, 8> kMagic{'P', 'D', 'F', 'E', 'V', 'C', 'K', 'P'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

 private:
  void le(std::uint64_t v, int width) {
    char buf[8];
    for (int i = 0; i < width; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out_.write(buf, width);
  }
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::uint64_t size) : in_(in), size_(size) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  void bytes(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (!in_) throw Error(ErrorCode::ParseError, "checkpoint truncated");
  }
  // Rejects element counts that cannot fit in the rest of the file.
  std::uint64_t count(std::uint64_t n, std::uint64_t element_bytes) {
    const auto pos = static_cast<std::uint64_t>(in_.tellg());
    if (n > (size_ - pos) / element_bytes) throw Error(ErrorCode::ParseError, "checkpoint truncated");
    return n;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::uint64_t le(int width) {
    unsigned char buf[8];
    in_.read(reinterpret_cast<char*>(buf), width);
    if (!in_) throw Error(ErrorCode::ParseError, "checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  std::istream& in_;
  std::uint64_t size_;
};

std::uint32_t mode_code(model::OutMode mode) {
  switch (mode) {
    case model::OutMode::regression_2ch: return 0;
    case model::OutMode::regression_1ch: return 1;
    case model::OutMode::segmentation_2class: return 2;
  }
  return 0;
}

}  // namespace

void save(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  if (!checkpoint.params.all_finite()) {
    throw Error(ErrorCode::NonFiniteParameters, "refusing to save non-finite parameters");
  }
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write checkpoint '" + path.string() + "'");
  Writer w(out);
  const auto& cfg = checkpoint.config;
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(cfg.in_channels));
  w.u32(static_cast<std::uint32_t>(cfg.kernel_size));
  w.u32(mode_code(cfg.out_mode));
  w.u64(cfg.seed);
  w.u32(static_cast<std::uint32_t>(cfg.hidden.size()));
  for (auto h : cfg.hidden) w.u32(static_cast<std::uint32_t>(h));
  w.u32(static_cast<std::uint32_t>(checkpoint.params.tensors.size()));
  for (const auto& t : checkpoint.params.tensors) {
    w.u32(static_cast<std::uint32_t>(t.name.size()));
    w.bytes(t.name.data(), t.name.size());
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.u64(d);
    w.u64(t.values.size());
    for (double v : t.values) w.f64(v);
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

Checkpoint load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open checkpoint '" + path.string() + "'");
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot stat checkpoint '" + path.string() + "'");
  Reader r(in, size);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw Error(ErrorCode::ParseError, "not a pdfevent checkpoint");
  const auto version = r.u32();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::ParseError, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.config.in_channels = r.u32();
  ck.config.kernel_size = r.u32();
  switch (r.u32()) {
    case 0: ck.config.out_mode = model::OutMode::regression_2ch; break;
    case 1: ck.config.out_mode = model::OutMode::regression_1ch; break;
    case 2: ck.config.out_mode = model::OutMode::segmentation_2class; break;
    default: throw Error(ErrorCode::ParseError, "unknown output mode in checkpoint");
  }
  ck.config.seed = r.u64();
  ck.config.hidden.resize(r.count(r.u32(), 4));
  for (auto& h : ck.config.hidden) h = r.u32();
  ck.params.tensors.resize(r.count(r.u32(), 4));
  for (auto& t : ck.params.tensors) {
    t.name.resize(r.count(r.u32(), 1));
    r.bytes(t.name.data(), t.name.size());
    t.shape.resize(r.count(r.u32(), 8));
    for (auto& d : t.shape) d = r.u64();
    t.values.resize(r.count(r.u64(), 8));
    for (auto& v : t.values) v = r.f64();
  }
  if (!r.at_end()) throw Error(ErrorCode::ParseError, "trailing bytes after checkpoint");
  model::validate(ck.config);
  // Tensor names and sizes must agree with the stored configuration.
  const auto expected = model::zero_parameters(ck.config);
  if (expected.tensors.size() != ck.params.tensors.size()) {
    throw Error(ErrorCode::ShapeMismatch, "checkpoint tensors do not match its model configuration");
  }
  for (std::size_t i = 0; i < expected.tensors.size(); ++i) {
    if (expected.tensors[i].name != ck.params.tensors[i].name ||
        expected.tensors[i].values.size() != ck.params.tensors[i].values.size()) {
      throw Error(ErrorCode::ShapeMismatch, "checkpoint tensor '" + ck.params.tensors[i].name + "' mismatched");
    }
  }
  return ck;
}

}  // namespace pdfevent::checkpoint
