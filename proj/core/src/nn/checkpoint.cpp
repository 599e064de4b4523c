#include "faaslab/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "faaslab/common/error.hpp"

namespace faaslab::nn {

static constexpr char kMagic[8] = {'F', 'S', 'L', 'B', 'C', 'K', 'P', 'T'};
static constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Writer {
  std::string buf;
  void bytes(const void* p, std::size_t n) { buf.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
};

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;
  void bytes(void* p, std::size_t n) {
    if (pos + n > buf.size()) throw TrainingError("checkpoint: truncated file");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw TrainingError("checkpoint: implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrainingError("checkpoint: cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

// Parses header+manifest and verifies magic and trailing checksum.
CheckpointManifest parse_manifest(const std::string& blob, Reader& r) {
  if (blob.size() < sizeof(kMagic) + sizeof(std::uint64_t)) {
    throw TrainingError("checkpoint: file too short");
  }
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw TrainingError("checkpoint: bad magic bytes");
  }
  const std::size_t body_len = blob.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, blob.data() + body_len, sizeof stored);
  if (fnv1a64(blob.data(), body_len) != stored) {
    throw TrainingError("checkpoint: checksum mismatch (file corrupted)");
  }

  CheckpointManifest mf;
  mf.version = r.u32();
  if (mf.version != kVersion) {
    throw TrainingError("checkpoint: unsupported format version " + std::to_string(mf.version));
  }
  mf.kind = r.str();
  const std::uint32_t count = r.u32();
  mf.tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    TensorInfo t;
    t.name = r.str();
    t.rows = static_cast<int>(r.u32());
    t.cols = static_cast<int>(r.u32());
    mf.tensors.push_back(std::move(t));
  }
  return mf;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::string& kind,
                     const ParamSet& params) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.str(kind);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.str(p.name);
    w.u32(static_cast<std::uint32_t>(p.rows));
    w.u32(static_cast<std::uint32_t>(p.cols));
  }
  for (const auto& p : params) w.bytes(p.values, p.size() * sizeof(double));
  w.u64(fnv1a64(w.buf.data(), w.buf.size()));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TrainingError("checkpoint: cannot write " + path.string());
  out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
  if (!out) throw TrainingError("checkpoint: short write to " + path.string());
}

void load_checkpoint(const std::filesystem::path& path, const std::string& kind,
                     const ParamSet& params) {
  const std::string blob = read_file(path);
  Reader r{blob};
  const CheckpointManifest mf = parse_manifest(blob, r);

  if (mf.kind != kind) {
    throw TrainingError("checkpoint: kind is '" + mf.kind + "', expected '" + kind + "'");
  }
  if (mf.tensors.size() != params.size()) {
    throw TrainingError("checkpoint: has " + std::to_string(mf.tensors.size()) +
                        " tensors, architecture expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const TensorInfo& t = mf.tensors[i];
    if (t.name != params[i].name || t.rows != params[i].rows || t.cols != params[i].cols) {
      throw TrainingError("checkpoint: tensor '" + t.name + "' (" + std::to_string(t.rows) + "x" +
                          std::to_string(t.cols) + ") does not match architecture tensor '" +
                          params[i].name + "' (" + std::to_string(params[i].rows) + "x" +
                          std::to_string(params[i].cols) + ")");
    }
  }
  for (const auto& p : params) r.bytes(p.values, p.size() * sizeof(double));
}

CheckpointManifest read_checkpoint_manifest(const std::filesystem::path& path) {
  const std::string blob = read_file(path);
  Reader r{blob};
  return parse_manifest(blob, r);
}

}  // namespace faaslab::nn
