#include "textpose/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "textpose/errors.hpp"

namespace textpose {

namespace {

constexpr char kMagic[4] = {'T', 'P', 'C', 'K'};
constexpr char kEndMagic[4] = {'K', 'C', 'P', 'T'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

struct Reader {
  std::istream& is;
  const std::string& path;

  void raw(void* dst, std::size_t n) {
    is.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
      throw CheckpointError("truncated checkpoint file: " + path);
  }
  std::uint32_t u32() {
    unsigned char b[4];
    raw(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    raw(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::string str() {
    std::uint32_t n = u32();
    if (n > (1u << 24)) throw CheckpointError("implausible string length in " + path);
    std::string s(n, '\0');
    if (n > 0) raw(s.data(), n);
    return s;
  }
};

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  put_u32(os, Checkpoint::kFormatVersion);
  put_string(os, ck.stage_tag);
  put_string(os, ck.config_echo);
  put_u64(os, ck.iteration);
  put_u64(os, ck.seed);
  put_u32(os, static_cast<std::uint32_t>(ck.blocks.size()));
  for (const auto& blk : ck.blocks) {
    put_string(os, blk.name);
    put_u32(os, static_cast<std::uint32_t>(blk.dims.size()));
    std::int64_t numel = 1;
    for (int d : blk.dims) {
      put_u32(os, static_cast<std::uint32_t>(d));
      numel *= d;
    }
    if (numel != static_cast<std::int64_t>(blk.data.size()))
      throw CheckpointError("block '" + blk.name + "' has inconsistent size");
    for (float f : blk.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32(os, bits);
    }
  }
  os.write(kEndMagic, 4);
  if (!os) throw CheckpointError("write failure on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint: " + path);
  Reader r{is, path};

  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw CheckpointError("bad magic in " + path);

  std::uint32_t version = r.u32();
  if (version != Checkpoint::kFormatVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " in " + path);

  Checkpoint ck;
  ck.stage_tag = r.str();
  ck.config_echo = r.str();
  ck.iteration = r.u64();
  ck.seed = r.u64();

  std::uint32_t nblocks = r.u32();
  if (nblocks > (1u << 20)) throw CheckpointError("implausible block count in " + path);
  ck.blocks.resize(nblocks);
  for (auto& blk : ck.blocks) {
    blk.name = r.str();
    std::uint32_t ndims = r.u32();
    if (ndims > 8) throw CheckpointError("implausible rank in " + path);
    std::int64_t numel = 1;
    blk.dims.resize(ndims);
    for (auto& d : blk.dims) {
      d = static_cast<int>(r.u32());
      if (d <= 0) throw CheckpointError("non-positive dimension in " + path);
      numel *= d;
    }
    if (numel > (1ll << 31)) throw CheckpointError("implausible block size in " + path);
    blk.data.resize(static_cast<std::size_t>(numel));
    for (auto& f : blk.data) {
      std::uint32_t bits = r.u32();
      std::memcpy(&f, &bits, 4);
    }
  }

  char end[4];
  r.raw(end, 4);
  if (std::memcmp(end, kEndMagic, 4) != 0) throw CheckpointError("bad end marker in " + path);
  if (is.peek() != std::char_traits<char>::eof())
    throw CheckpointError("trailing bytes after checkpoint payload in " + path);
  return ck;
}

Checkpoint load_checkpoint_for_stage(const std::string& path, const std::string& stage_tag) {
  Checkpoint ck = load_checkpoint(path);
  if (ck.stage_tag != stage_tag)
    throw StageMismatchError("checkpoint " + path + " holds stage '" + ck.stage_tag + "', expected '" +
                             stage_tag + "'");
  return ck;
}

Checkpoint snapshot_params(const nn::ParamSet& params, const std::string& stage_tag,
                           const std::string& config_echo, std::uint64_t iteration, std::uint64_t seed) {
  Checkpoint ck;
  ck.stage_tag = stage_tag;
  ck.config_echo = config_echo;
  ck.iteration = iteration;
  ck.seed = seed;
  for (const auto& e : params.entries()) {
    CheckpointBlock blk;
    blk.name = e.name;
    blk.dims = e.var->val.shape();
    const auto& t = e.var->val;
    blk.data.resize(static_cast<std::size_t>(t.numel()));
    for (std::int64_t i = 0; i < t.numel(); ++i) blk.data[static_cast<std::size_t>(i)] = static_cast<float>(t[i]);
    ck.blocks.push_back(std::move(blk));
  }
  return ck;
}

void restore_params(const Checkpoint& ck, nn::ParamSet& params) {
  const auto& entries = params.entries();
  if (ck.blocks.size() != entries.size())
    throw CheckpointError("checkpoint holds " + std::to_string(ck.blocks.size()) + " blocks, model has " +
                          std::to_string(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& blk = ck.blocks[i];
    const auto& e = entries[i];
    if (blk.name != e.name)
      throw CheckpointError("block " + std::to_string(i) + " is '" + blk.name + "', model expects '" +
                            e.name + "'");
    if (blk.dims != e.var->val.shape())
      throw CheckpointError("block '" + blk.name + "' shape mismatch: file " + nn::shape_str(blk.dims) +
                            " vs model " + nn::shape_str(e.var->val.shape()));
    auto& t = e.var->val;
    for (std::int64_t j = 0; j < t.numel(); ++j) t[j] = static_cast<double>(blk.data[static_cast<std::size_t>(j)]);
  }
}

}  // namespace textpose
