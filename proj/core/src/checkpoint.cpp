#include "oracular/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"

namespace oracular::cvrnn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'O', 'R', 'C', 'V', 'R', 'N', 'N', '\0'};

const char* to_string(CheckpointErrc code) {
  switch (code) {
    case CheckpointErrc::kBadMagic: return "BadMagic";
    case CheckpointErrc::kUnsupportedVersion: return "UnsupportedVersion";
    case CheckpointErrc::kTruncated: return "Truncated";
    case CheckpointErrc::kShapeMismatch: return "ShapeMismatch";
    case CheckpointErrc::kBadHeader: return "BadHeader";
    case CheckpointErrc::kIo: return "Io";
  }
  return "Unknown";
}

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string string(std::uint64_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void doubles(std::span<double> out) {
    need(out.size() * sizeof(double));
    std::memcpy(out.data(), bytes_.data() + pos_, out.size() * sizeof(double));
    pos_ += out.size() * sizeof(double);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw CheckpointError(CheckpointErrc::kTruncated, "unexpected end of checkpoint");
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json header_json(const Checkpoint& c) {
  const Architecture& a = c.params.arch;
  return {
      {"architecture",
       {{"frame_steps", a.frame_steps},
        {"note_range", a.note_range},
        {"conv1_filters", a.conv1_filters},
        {"conv2_filters", a.conv2_filters},
        {"encoder_hidden", a.encoder_hidden},
        {"decoder_hidden", a.decoder_hidden},
        {"z_dim", a.z_dim},
        {"seq_len", a.seq_len},
        {"candidate_bias", a.candidate_bias == CandidateBias::kReset ? "reset" : "candidate"}}},
      {"config",
       {{"learning_rate", c.config.learning_rate},
        {"clip_norm", c.config.clip_norm},
        {"dropout_p", c.config.dropout_p},
        {"epochs", c.config.epochs},
        {"z_dim", c.config.z_dim},
        {"mc_samples", c.config.mc_samples},
        {"rng_seed", c.config.rng_seed}}},
  };
}

void parse_header(const nlohmann::json& j, Checkpoint& c) {
  const auto& a = j.at("architecture");
  Architecture arch;
  arch.frame_steps = a.at("frame_steps").get<std::size_t>();
  arch.note_range = a.at("note_range").get<std::size_t>();
  arch.conv1_filters = a.at("conv1_filters").get<std::size_t>();
  arch.conv2_filters = a.at("conv2_filters").get<std::size_t>();
  arch.encoder_hidden = a.at("encoder_hidden").get<std::size_t>();
  arch.decoder_hidden = a.at("decoder_hidden").get<std::size_t>();
  arch.z_dim = a.at("z_dim").get<std::size_t>();
  arch.seq_len = a.at("seq_len").get<std::size_t>();
  const std::string bias = a.at("candidate_bias").get<std::string>();
  if (bias == "reset") {
    arch.candidate_bias = CandidateBias::kReset;
  } else if (bias == "candidate") {
    arch.candidate_bias = CandidateBias::kCandidate;
  } else {
    throw CheckpointError(CheckpointErrc::kBadHeader, "unknown candidate_bias '" + bias + "'");
  }
  arch.validate();
  c.params = CvrnnParams::zeros(arch);

  const auto& k = j.at("config");
  c.config.learning_rate = k.at("learning_rate").get<double>();
  c.config.clip_norm = k.at("clip_norm").get<double>();
  c.config.dropout_p = k.at("dropout_p").get<double>();
  c.config.epochs = k.at("epochs").get<std::size_t>();
  c.config.z_dim = k.at("z_dim").get<std::size_t>();
  c.config.mc_samples = k.at("mc_samples").get<std::size_t>();
  c.config.rng_seed = k.at("rng_seed").get<std::uint64_t>();
}

std::string shape_text(const std::vector<std::size_t>& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + ")";
}

}  // namespace

CheckpointError::CheckpointError(CheckpointErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  const std::string header = header_json(ckpt).dump();
  put<std::uint64_t>(out, header.size());
  out.insert(out.end(), header.begin(), header.end());

  const auto tensors = ckpt.params.named_tensors();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t->rank()));
    for (std::size_t d : t->shape()) put<std::uint64_t>(out, d);
    for (double v : t->values()) put<double>(out, v);
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes);
  if (in.string(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw CheckpointError(CheckpointErrc::kBadMagic, "not a model checkpoint");
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointErrc::kUnsupportedVersion, "version " + std::to_string(version));
  }

  Checkpoint ckpt;
  const auto header_len = in.get<std::uint64_t>();
  try {
    parse_header(nlohmann::json::parse(in.string(header_len)), ckpt);
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(CheckpointErrc::kBadHeader, e.what());
  }

  auto tensors = ckpt.params.named_tensors();
  const auto count = in.get<std::uint32_t>();
  if (count != tensors.size()) {
    throw CheckpointError(CheckpointErrc::kShapeMismatch,
                          std::to_string(count) + " tensors, expected " + std::to_string(tensors.size()));
  }
  for (auto& [name, t] : tensors) {
    const std::string got = in.string(in.get<std::uint32_t>());
    if (got != name) throw CheckpointError(CheckpointErrc::kShapeMismatch, "tensor '" + got + "', expected '" + name + "'");
    const auto rank = in.get<std::uint32_t>();
    if (rank > 8) throw CheckpointError(CheckpointErrc::kShapeMismatch, name + " has rank " + std::to_string(rank));
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(in.get<std::uint64_t>());
    if (shape != t->shape()) {
      throw CheckpointError(CheckpointErrc::kShapeMismatch,
                            name + " is " + shape_text(shape) + ", expected " + t->shape_string());
    }
    in.doubles(t->values());
  }
  if (!in.done()) throw CheckpointError(CheckpointErrc::kTruncated, "trailing bytes after last tensor");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointErrc::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointErrc::kIo, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointErrc::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace oracular::cvrnn
