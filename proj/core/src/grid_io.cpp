#include "inrsep/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace inrsep::io {

static_assert(std::endian::native == std::endian::little,
              "grid codec assumes a little-endian host");

namespace {

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u16(std::uint16_t v) { raw(&v, 2); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void raw(void* p, std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw IoError(IoError::Kind::kTruncated, "grid file: truncated");
    }
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::uint16_t u16() { std::uint16_t v; raw(&v, 2); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
  double f64() { double v; raw(&v, 8); return v; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_grid(const Grid& grid) {
  Writer w;
  w.raw("GRD1", 4);
  w.u16(kGridFormatVersion);
  w.u16(1);  // dtype f64
  w.u16(static_cast<std::uint16_t>(grid.ndim()));
  for (std::size_t e : grid.shape()) w.u64(e);
  for (const Axis& a : grid.axes()) {
    w.f64(a.lo);
    w.f64(a.hi);
    w.u16(static_cast<std::uint16_t>(a.label.size()));
    w.raw(a.label.data(), a.label.size());
  }
  w.raw(grid.values().data(), grid.values().size() * sizeof(double));
  return w.take();
}

Grid decode_grid(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, "GRD1", 4) != 0) {
    throw IoError(IoError::Kind::kBadMagic, "grid file: bad magic");
  }
  const std::uint16_t version = r.u16();
  if (version != kGridFormatVersion) {
    throw IoError(IoError::Kind::kBadVersion, "grid file: unsupported version");
  }
  const std::uint16_t dtype = r.u16();
  if (dtype != 1) throw IoError(IoError::Kind::kBadDtype, "grid file: unsupported dtype");
  const std::uint16_t ndim = r.u16();
  if (ndim == 0) throw IoError(IoError::Kind::kCorrupt, "grid file: zero rank");
  std::vector<std::size_t> shape(ndim);
  std::size_t cells = 1;
  for (auto& e : shape) {
    e = static_cast<std::size_t>(r.u64());
    if (e == 0) throw IoError(IoError::Kind::kCorrupt, "grid file: zero extent");
    cells *= e;
  }
  std::vector<Axis> axes(ndim);
  for (Axis& a : axes) {
    a.lo = r.f64();
    a.hi = r.f64();
    const std::uint16_t len = r.u16();
    a.label.resize(len);
    r.raw(a.label.data(), len);
  }
  std::vector<double> values(cells);
  r.raw(values.data(), cells * sizeof(double));
  if (r.remaining() != 0) {
    throw IoError(IoError::Kind::kCorrupt, "grid file: trailing bytes");
  }
  try {
    return Grid(std::move(shape), std::move(axes), std::move(values));
  } catch (const std::exception& e) {
    throw IoError(IoError::Kind::kCorrupt, std::string("grid file: ") + e.what());
  }
}

Grid read_grid(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(IoError::Kind::kOpenFailed, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_grid(bytes);
}

void write_grid(const Grid& grid, const std::filesystem::path& path) {
  const auto bytes = encode_grid(grid);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(IoError::Kind::kOpenFailed, "cannot open " + path.string() + " for write");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError(IoError::Kind::kOpenFailed, "write failed: " + path.string());
}

}  // namespace inrsep::io
