#include "inrsep/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "inrsep/grid_io.hpp"

namespace inrsep::io {

static_assert(std::endian::native == std::endian::little,
              "checkpoint codec assumes a little-endian host");

namespace {

using Bytes = std::vector<std::uint8_t>;

void put_raw(Bytes& b, const void* p, std::size_t n) {
  const auto* s = static_cast<const std::uint8_t*>(p);
  b.insert(b.end(), s, s + n);
}
void put_u8(Bytes& b, std::uint8_t v) { put_raw(b, &v, 1); }
void put_u16(Bytes& b, std::uint16_t v) { put_raw(b, &v, 2); }
void put_u32(Bytes& b, std::uint32_t v) { put_raw(b, &v, 4); }
void put_u64(Bytes& b, std::uint64_t v) { put_raw(b, &v, 8); }
void put_f64(Bytes& b, double v) { put_raw(b, &v, 8); }

struct Cursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  void raw(void* p, std::size_t n) {
    if (pos + n > bytes.size()) throw IoError(IoError::Kind::kTruncated, "checkpoint: truncated");
    std::memcpy(p, bytes.data() + pos, n);
    pos += n;
  }
  std::uint8_t u8() { std::uint8_t v; raw(&v, 1); return v; }
  std::uint16_t u16() { std::uint16_t v; raw(&v, 2); return v; }
  std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
  double f64() { double v; raw(&v, 8); return v; }
};

void put_tensor(Bytes& b, const ad::Tensor& t) {
  put_u16(b, static_cast<std::uint16_t>(t.ndim()));
  for (std::size_t e : t.shape) put_u64(b, e);
  put_raw(b, t.v.data(), t.v.size() * sizeof(double));
}

ad::Tensor get_tensor(Cursor& c) {
  const std::uint16_t nd = c.u16();
  std::vector<std::size_t> shape(nd);
  std::size_t n = 1;
  for (auto& e : shape) {
    e = static_cast<std::size_t>(c.u64());
    n *= e;
  }
  std::vector<double> v(n);
  c.raw(v.data(), n * sizeof(double));
  return ad::Tensor(std::move(shape), std::move(v));
}

void put_siren_spec(Bytes& b, const models::SirenSpec& s) {
  put_u16(b, static_cast<std::uint16_t>(s.input_dim));
  put_u16(b, static_cast<std::uint16_t>(s.hidden_dims.size()));
  for (std::size_t h : s.hidden_dims) put_u16(b, static_cast<std::uint16_t>(h));
  put_u16(b, static_cast<std::uint16_t>(s.output_dim));
  put_f64(b, s.w0_first);
  put_u8(b, static_cast<std::uint8_t>(s.final_activation));
}

models::SirenSpec get_siren_spec(Cursor& c) {
  models::SirenSpec s;
  s.input_dim = c.u16();
  const std::uint16_t nh = c.u16();
  s.hidden_dims.resize(nh);
  for (auto& h : s.hidden_dims) h = c.u16();
  s.output_dim = c.u16();
  s.w0_first = c.f64();
  s.final_activation = static_cast<models::FinalActivation>(c.u8());
  return s;
}

void put_siren_params(Bytes& b, const models::SirenParams& p) {
  put_u16(b, static_cast<std::uint16_t>(p.weights.size()));
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    put_tensor(b, p.weights[k]);
    put_tensor(b, p.biases[k]);
  }
}

models::SirenParams get_siren_params(Cursor& c) {
  models::SirenParams p;
  const std::uint16_t n = c.u16();
  for (std::uint16_t k = 0; k < n; ++k) {
    p.weights.push_back(get_tensor(c));
    p.biases.push_back(get_tensor(c));
  }
  return p;
}

Bytes encode_kernel_net(const models::KernelNetSpec& spec, const models::KernelNetParams& p) {
  Bytes b;
  put_siren_spec(b, spec.subnet);
  put_u64(b, spec.head_hidden);
  put_u64(b, spec.window);
  put_siren_params(b, p.subnet);
  put_tensor(b, p.head_w1);
  put_tensor(b, p.head_b1);
  put_tensor(b, p.head_w2);
  put_tensor(b, p.head_b2);
  return b;
}

Bytes encode_bkgd_net(const models::SirenSpec& spec, const models::SirenParams& p) {
  Bytes b;
  put_siren_spec(b, spec);
  put_siren_params(b, p);
  return b;
}

Bytes encode_signal(const models::SignalModel& s) {
  Bytes b;
  put_u8(b, static_cast<std::uint8_t>(s.kind()));
  if (s.kind() == models::SignalModelKind::kAnalytic) {
    const auto& p = s.analytic_params();
    put_f64(b, p.J);
    put_f64(b, p.Jp);
    put_f64(b, p.amplitude);
    put_f64(b, p.sigma_omega);
  } else {
    const Bytes grid = encode_grid(s.backing());
    put_u64(b, grid.size());
    put_raw(b, grid.data(), grid.size());
  }
  return b;
}

models::SignalModel decode_signal(Cursor& c) {
  const auto kind = static_cast<models::SignalModelKind>(c.u8());
  if (kind == models::SignalModelKind::kAnalytic) {
    models::AnalyticSignalParams p;
    p.J = c.f64();
    p.Jp = c.f64();
    p.amplitude = c.f64();
    p.sigma_omega = c.f64();
    return models::SignalModel::analytic(p);
  }
  const std::uint64_t n = c.u64();
  std::vector<std::uint8_t> blob(n);
  c.raw(blob.data(), n);
  return models::SignalModel::gridded(decode_grid(blob));
}

}  // namespace

CheckpointSizes checkpoint_sizes(const models::ModelBundle& bundle) {
  CheckpointSizes s;
  s.kernel_net = encode_kernel_net(bundle.kernel_spec, bundle.kernel_params).size();
  s.bkgd_net = encode_bkgd_net(bundle.bkgd_spec, bundle.bkgd_params).size();
  s.signal_model = encode_signal(bundle.signal).size();
  return s;
}

CheckpointSizes save_checkpoint(const models::ModelBundle& bundle, const CheckpointEcho& echo,
                                const std::filesystem::path& path) {
  const Bytes kernel = encode_kernel_net(bundle.kernel_spec, bundle.kernel_params);
  const Bytes bkgd = encode_bkgd_net(bundle.bkgd_spec, bundle.bkgd_params);
  const Bytes signal = encode_signal(bundle.signal);

  Bytes b;
  put_raw(b, "INRC", 4);
  put_u16(b, kCheckpointVersion);
  put_u32(b, static_cast<std::uint32_t>(echo.r));
  put_f64(b, echo.lambda);
  put_u64(b, echo.seed);
  put_u8(b, static_cast<std::uint8_t>(echo.transform));
  put_u8(b, static_cast<std::uint8_t>(echo.loss_kind));
  put_u16(b, static_cast<std::uint16_t>(bundle.d));
  put_u16(b, static_cast<std::uint16_t>(bundle.grid_shape.size()));
  for (std::size_t a = 0; a < bundle.grid_shape.size(); ++a) {
    put_u64(b, bundle.grid_shape[a]);
    put_f64(b, bundle.grid_axes[a].lo);
    put_f64(b, bundle.grid_axes[a].hi);
    put_u16(b, static_cast<std::uint16_t>(bundle.grid_axes[a].label.size()));
    put_raw(b, bundle.grid_axes[a].label.data(), bundle.grid_axes[a].label.size());
  }
  put_u64(b, kernel.size());
  put_u64(b, bkgd.size());
  put_u64(b, signal.size());
  put_raw(b, kernel.data(), kernel.size());
  put_raw(b, bkgd.data(), bkgd.size());
  put_raw(b, signal.data(), signal.size());

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(IoError::Kind::kOpenFailed, "cannot open " + path.string() + " for write");
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!f) throw IoError(IoError::Kind::kOpenFailed, "write failed: " + path.string());

  return CheckpointSizes{kernel.size(), bkgd.size(), signal.size()};
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(IoError::Kind::kOpenFailed, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                        std::istreambuf_iterator<char>());
  Cursor c{bytes};

  char magic[4];
  c.raw(magic, 4);
  if (std::memcmp(magic, "INRC", 4) != 0) {
    throw IoError(IoError::Kind::kBadMagic, "checkpoint: bad magic");
  }
  if (c.u16() != kCheckpointVersion) {
    throw IoError(IoError::Kind::kBadVersion, "checkpoint: unsupported version");
  }

  Checkpoint out;
  out.echo.r = c.u32();
  out.echo.lambda = c.f64();
  out.echo.seed = c.u64();
  out.echo.transform = static_cast<engine::Transform>(c.u8());
  out.echo.loss_kind = static_cast<engine::LossKind>(c.u8());

  models::ModelBundle& bundle = out.bundle;
  bundle.r = out.echo.r;
  bundle.lambda = out.echo.lambda;
  bundle.d = c.u16();
  const std::uint16_t ndim = c.u16();
  bundle.grid_shape.resize(ndim);
  bundle.grid_axes.resize(ndim);
  for (std::uint16_t a = 0; a < ndim; ++a) {
    bundle.grid_shape[a] = static_cast<std::size_t>(c.u64());
    bundle.grid_axes[a].lo = c.f64();
    bundle.grid_axes[a].hi = c.f64();
    const std::uint16_t len = c.u16();
    bundle.grid_axes[a].label.resize(len);
    c.raw(bundle.grid_axes[a].label.data(), len);
  }

  out.sizes.kernel_net = c.u64();
  out.sizes.bkgd_net = c.u64();
  out.sizes.signal_model = c.u64();
  const std::size_t payload_start = c.pos;
  if (bytes.size() - payload_start != out.sizes.total()) {
    throw IoError(IoError::Kind::kSizeMismatch,
                  "checkpoint: header sizes disagree with payload length");
  }

  {
    Cursor k{std::span(bytes).subspan(payload_start, out.sizes.kernel_net)};
    bundle.kernel_spec.subnet = get_siren_spec(k);
    bundle.kernel_spec.head_hidden = static_cast<std::size_t>(k.u64());
    bundle.kernel_spec.window = static_cast<std::size_t>(k.u64());
    bundle.kernel_params.subnet = get_siren_params(k);
    bundle.kernel_params.head_w1 = get_tensor(k);
    bundle.kernel_params.head_b1 = get_tensor(k);
    bundle.kernel_params.head_w2 = get_tensor(k);
    bundle.kernel_params.head_b2 = get_tensor(k);
    if (k.pos != out.sizes.kernel_net) {
      throw IoError(IoError::Kind::kSizeMismatch, "checkpoint: kernel net section size mismatch");
    }
  }
  {
    Cursor k{std::span(bytes).subspan(payload_start + out.sizes.kernel_net, out.sizes.bkgd_net)};
    bundle.bkgd_spec = get_siren_spec(k);
    bundle.bkgd_params = get_siren_params(k);
    if (k.pos != out.sizes.bkgd_net) {
      throw IoError(IoError::Kind::kSizeMismatch, "checkpoint: bkgd net section size mismatch");
    }
  }
  {
    Cursor k{std::span(bytes).subspan(payload_start + out.sizes.kernel_net + out.sizes.bkgd_net,
                                      out.sizes.signal_model)};
    bundle.signal = decode_signal(k);
    if (k.pos != out.sizes.signal_model) {
      throw IoError(IoError::Kind::kSizeMismatch, "checkpoint: signal section size mismatch");
    }
  }
  return out;
}

}  // namespace inrsep::io
