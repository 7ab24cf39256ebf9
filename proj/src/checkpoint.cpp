#include "metaprior/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace metaprior {

namespace {

constexpr char kMagic[4] = {'M', 'P', 'C', 'K'};
constexpr std::uint8_t kLittleEndianTag = 'L';
constexpr std::uint8_t kFloatBits = 64;

void put_u8(std::ostream& out, std::uint8_t v) {
  out.put(static_cast<char>(v));
}

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) put_u8(out, static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) put_u8(out, static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint8_t get_u8(std::istream& in) {
  const int c = in.get();
  if (c == EOF) throw CheckpointError("checkpoint: truncated file");
  return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(get_u8(in)) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(get_u8(in)) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::uint8_t activation_tag(Activation act) {
  return act == Activation::kTanh ? 0 : 1;
}

Activation activation_from_tag(std::uint8_t tag) {
  if (tag == 0) return Activation::kTanh;
  if (tag == 1) return Activation::kIdentity;
  throw CheckpointError("checkpoint: unknown activation tag");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (ckpt.weights.size() != parameter_count(ckpt.layout)) {
    throw CheckpointError("checkpoint: weight count does not match layout");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot open for writing: " +
                                  path.string());

  out.write(kMagic, sizeof(kMagic));
  put_u8(out, Checkpoint::kFormatVersion);
  put_u8(out, kLittleEndianTag);
  put_u8(out, kFloatBits);
  put_u8(out, 0);  // reserved

  put_u32(out, static_cast<std::uint32_t>(ckpt.layout.size()));
  for (const LayerSpec& spec : ckpt.layout) {
    put_u32(out, static_cast<std::uint32_t>(spec.input_dim));
    put_u32(out, static_cast<std::uint32_t>(spec.output_dim));
    put_u8(out, activation_tag(spec.activation));
  }
  put_u64(out, static_cast<std::uint64_t>(ckpt.weights.size()));
  for (Index i = 0; i < ckpt.weights.size(); ++i) put_f64(out, ckpt.weights[i]);
  put_u64(out, ckpt.iterations_completed);
  put_u64(out, ckpt.seed);

  if (!out) throw CheckpointError("checkpoint: write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open: " + path.string());

  char magic[4];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError("checkpoint: bad magic: " + path.string());
  }
  const std::uint8_t version = get_u8(in);
  if (version != Checkpoint::kFormatVersion) {
    throw CheckpointError("checkpoint: unsupported format version " +
                          std::to_string(version));
  }
  if (get_u8(in) != kLittleEndianTag || get_u8(in) != kFloatBits) {
    throw CheckpointError("checkpoint: unsupported encoding");
  }
  get_u8(in);  // reserved

  Checkpoint ckpt;
  const std::uint32_t layers = get_u32(in);
  if (layers == 0 || layers > 1024) {
    throw CheckpointError("checkpoint: implausible layer count");
  }
  ckpt.layout.resize(layers);
  for (auto& spec : ckpt.layout) {
    spec.input_dim = static_cast<Index>(get_u32(in));
    spec.output_dim = static_cast<Index>(get_u32(in));
    spec.activation = activation_from_tag(get_u8(in));
  }

  const std::uint64_t count = get_u64(in);
  if (count != static_cast<std::uint64_t>(parameter_count(ckpt.layout))) {
    throw CheckpointError("checkpoint: weight count does not match layout");
  }
  ckpt.weights.resize(static_cast<Index>(count));
  for (Index i = 0; i < ckpt.weights.size(); ++i) ckpt.weights[i] = get_f64(in);
  ckpt.iterations_completed = get_u64(in);
  ckpt.seed = get_u64(in);

  try {
    validate_layout(ckpt.layout);
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint: invalid layout: ") +
                          e.what());
  }
  return ckpt;
}

}  // namespace metaprior
