#include "sidl/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "sidl/checksum.hpp"

namespace sidl {

namespace {

constexpr char kMagic[4] = {'S', 'I', 'D', 'L'};
constexpr std::uint16_t kVersion = 1;

void append_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void append_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void append_f64(std::vector<unsigned char>& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  append_u64(out, bits);
}

struct Reader {
  const std::vector<unsigned char>& buf;
  std::size_t pos = 0;
  void need(std::size_t n) const {
    if (pos + n > buf.size())
      throw std::runtime_error("checkpoint: truncated file");
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(buf[pos] | (buf[pos + 1] << 8));
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }
};

}  // namespace

void Checkpoint::put(const std::string& name, const Tensor& t) {
  sections[name] = t.detach();
}

const Tensor& Checkpoint::get(const std::string& name) const {
  auto it = sections.find(name);
  if (it == sections.end())
    throw std::runtime_error("checkpoint: missing section " + name);
  return it->second;
}

bool Checkpoint::has(const std::string& name) const {
  return sections.count(name) > 0;
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  std::vector<unsigned char> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  append_u16(out, kVersion);
  append_u32(out, static_cast<std::uint32_t>(c.sections.size()));
  for (const auto& [name, t] : c.sections) {
    append_u32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    append_u32(out, static_cast<std::uint32_t>(t.shape().size()));
    for (auto e : t.shape()) append_u64(out, e);
    for (double v : t.values()) append_f64(out, v);
  }
  append_u64(out, fnv1a(out.data(), out.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("checkpoint: write failed " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 4 + 2 + 4 + 8)
    throw std::runtime_error("checkpoint: file too small");
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i)
    stored |= static_cast<std::uint64_t>(buf[buf.size() - 8 + i]) << (8 * i);
  if (fnv1a(buf.data(), buf.size() - 8) != stored)
    throw std::runtime_error("checkpoint: checksum mismatch");

  Reader r{buf};
  r.need(4);
  if (std::memcmp(buf.data(), kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  r.pos = 4;
  if (r.u16() != kVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  std::uint32_t count = r.u32();
  Checkpoint c;
  for (std::uint32_t k = 0; k < count; ++k) {
    std::uint32_t nlen = r.u32();
    r.need(nlen);
    std::string name(buf.begin() + static_cast<std::ptrdiff_t>(r.pos),
                     buf.begin() + static_cast<std::ptrdiff_t>(r.pos + nlen));
    r.pos += nlen;
    std::uint32_t ndim = r.u32();
    Shape shape;
    std::size_t numel = 1;
    for (std::uint32_t i = 0; i < ndim; ++i) {
      shape.push_back(static_cast<std::size_t>(r.u64()));
      numel *= shape.back();
    }
    std::vector<double> data(numel);
    for (auto& v : data) v = r.f64();
    c.sections[name] = Tensor::from(std::move(shape), std::move(data));
  }
  return c;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("file_checksum: cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  return fnv1a(buf.data(), buf.size());
}

}  // namespace sidl
