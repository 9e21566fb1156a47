#include "tweetpolarity/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace tp {

namespace {

constexpr std::string_view kMetaName = "__meta__";
constexpr std::size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

template <typename U>
void put(std::ostream& out, U v) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), sizeof(U));
}

void put_name(std::ostream& out, std::string_view name) {
  if (name.size() > std::numeric_limits<std::uint16_t>::max())
    throw std::invalid_argument("checkpoint: array name longer than 65535 bytes");
  put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw CheckpointError(CheckpointError::Kind::Truncated, std::string("checkpoint: truncated payload while reading ") + what);
  }

  template <typename U>
  U get(const char* what) {
    unsigned char b[sizeof(U)];
    bytes(reinterpret_cast<char*>(b), sizeof(U), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return static_cast<U>(v);
  }

  std::string name(const char* what) {
    const auto n = get<std::uint16_t>(what);
    std::string s(n, '\0');
    bytes(s.data(), n, what);
    return s;
  }

 private:
  std::istream& in_;
};

std::map<std::string, std::string> parse_meta(const std::string& blob) {
  std::map<std::string, std::string> meta;
  std::istringstream in(blob);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: metadata line without '=': " + line);
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

const NamedArray& Checkpoint::at(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: missing array '" + name + "'");
}

const std::string& Checkpoint::meta_at(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: missing metadata '" + key + "'");
  return it->second;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kCheckpointMagic, static_cast<std::streamsize>(kMagicLen));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const auto& a : ckpt.arrays) {
    std::uint64_t n = 1;
    for (const auto d : a.dims) n *= d;
    if (n != a.data.size())
      throw ShapeError("checkpoint: array '" + a.name + "' has " + std::to_string(a.data.size()) +
                       " values for dims of size " + std::to_string(n));
    if (a.dims.size() > 255) throw ShapeError("checkpoint: array '" + a.name + "' has rank above 255");
    put_name(out, a.name);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(a.dims.size()));
    for (const auto d : a.dims) put<std::uint32_t>(out, d);
    for (const float f : a.data) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
  }
  std::string blob;
  for (const auto& [k, v] : ckpt.meta) {
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos || v.find('\n') != std::string::npos)
      throw std::invalid_argument("checkpoint: metadata key or value contains a separator: " + k);
    blob += k + "=" + v + "\n";
  }
  put_name(out, kMetaName);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw DataError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in);
  char magic[kMagicLen];
  in.read(magic, static_cast<std::streamsize>(kMagicLen));
  if (static_cast<std::size_t>(in.gcount()) != kMagicLen || std::memcmp(magic, kCheckpointMagic, kMagicLen) != 0)
    throw CheckpointError(CheckpointError::Kind::BadMagic, "checkpoint: bad magic (not an NNCP1 file)");

  Checkpoint ckpt;
  const auto count = r.get<std::uint32_t>("array count");
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedArray a;
    a.name = r.name("array name");
    const auto rank = r.get<std::uint8_t>("rank");
    std::uint64_t n = 1;
    for (int k = 0; k < rank; ++k) {
      const auto d = r.get<std::uint32_t>("dims");
      a.dims.push_back(d);
      // element count times four bytes must fit comfortably in memory sizes
      if (d != 0 && n > (std::numeric_limits<std::uint64_t>::max() / 8) / d)
        throw CheckpointError(CheckpointError::Kind::DimensionOverflow,
                              "checkpoint: dimension overflow in array '" + a.name + "'");
      n *= d;
    }
    if (n > static_cast<std::uint64_t>(std::numeric_limits<std::ptrdiff_t>::max() / 4))
      throw CheckpointError(CheckpointError::Kind::DimensionOverflow, "checkpoint: dimension overflow in array '" + a.name + "'");
    // read in bounded chunks so a lying header cannot force a huge allocation
    constexpr std::uint64_t kChunk = 1 << 16;
    std::vector<char> buf;
    for (std::uint64_t done = 0; done < n;) {
      const auto take = std::min(kChunk, n - done);
      buf.resize(static_cast<std::size_t>(take * 4));
      r.bytes(buf.data(), buf.size(), "array payload");
      for (std::uint64_t j = 0; j < take; ++j) {
        std::uint32_t u = 0;
        for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[j * 4 + static_cast<std::uint64_t>(b)])) << (8 * b);
        a.data.push_back(std::bit_cast<float>(u));
      }
      done += take;
    }
    ckpt.arrays.push_back(std::move(a));
  }
  const auto meta_name = r.name("metadata name");
  if (meta_name != kMetaName)
    throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: expected metadata blob, found '" + meta_name + "'");
  const auto len = r.get<std::uint32_t>("metadata length");
  std::string blob;
  constexpr std::uint32_t kChunk = 1 << 16;
  for (std::uint32_t done = 0; done < len;) {
    const auto take = std::min(kChunk, len - done);
    const auto at = blob.size();
    blob.resize(at + take);
    r.bytes(blob.data() + at, take, "metadata");
    done += take;
  }
  ckpt.meta = parse_meta(blob);
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_checkpoint(in);
}

// ---------------------------------------------------------------------------
// Model mapping

namespace {

NamedArray array_of(const TensorRef<float>& t) {
  return {t.name, t.dims, std::vector<float>(t.data.begin(), t.data.end())};
}

NamedArray matrix_array(std::string name, const Matrix<float>& m) {
  return {std::move(name),
          {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())},
          std::vector<float>(m.data(), m.data() + m.size())};
}

Matrix<float> matrix_from(const NamedArray& a) {
  if (a.dims.size() != 2)
    throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: array '" + a.name + "' is not a matrix");
  Matrix<float> m(a.dims[0], a.dims[1]);
  std::copy(a.data.begin(), a.data.end(), m.data());
  return m;
}

void copy_into(const NamedArray& src, TensorRef<float>& dst) {
  if (src.dims != dst.dims)
    throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: array '" + src.name + "' has unexpected shape");
  std::copy(src.data.begin(), src.data.end(), dst.data.begin());
}

void put_embedding_meta(Checkpoint& c, const Vocabulary& vocab, std::uint64_t seed) {
  c.meta["vocab_hash"] = hex64(vocab.hash());
  c.meta["vocab_size"] = std::to_string(vocab.size());
  c.meta["seed"] = std::to_string(seed);
}

void check_vocab(const Checkpoint& c, const Vocabulary& vocab) {
  if (c.meta_at("vocab_hash") != hex64(vocab.hash()))
    throw CheckpointError(CheckpointError::Kind::VocabMismatch,
                          "checkpoint: vocabulary hash " + c.meta_at("vocab_hash") + " does not match supplied vocabulary " +
                              hex64(vocab.hash()));
}

int meta_int(const Checkpoint& c, const std::string& key) {
  try {
    return std::stoi(c.meta_at(key));
  } catch (const std::logic_error&) {
    throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: metadata '" + key + "' is not an integer");
  }
}

}  // namespace

Checkpoint embeddings_checkpoint(const EmbeddingMatrix<float>& emb, const Vocabulary& vocab, std::uint64_t seed) {
  if (emb.vocab_size() != vocab.size()) throw ShapeError("checkpoint: embedding rows do not match vocabulary size");
  Checkpoint c;
  c.arrays.push_back(matrix_array("embedding.table", emb.table));
  c.arrays.push_back(matrix_array("embedding.topic", emb.topic));
  c.meta["kind"] = "embedding";
  put_embedding_meta(c, vocab, seed);
  return c;
}

EmbeddingMatrix<float> embeddings_from(const Checkpoint& ckpt, const Vocabulary& vocab) {
  check_vocab(ckpt, vocab);
  EmbeddingMatrix<float> e;
  e.table = matrix_from(ckpt.at("embedding.table"));
  e.topic = matrix_from(ckpt.at("embedding.topic"));
  if (e.vocab_size() != vocab.size() || e.topic.rows() != 2)
    throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: embedding shapes do not fit the vocabulary");
  return e;
}

Checkpoint model_checkpoint(const TrainedModel& model, const Vocabulary& vocab, std::uint64_t seed) {
  Checkpoint c = embeddings_checkpoint(model.emb, vocab, seed);
  auto params = model.params;
  for (const auto& t : params.tensors()) c.arrays.push_back(array_of(t));
  const auto& a = model.arch;
  c.meta["kind"] = std::string(to_string(model.kind));
  c.meta["subtask"] = std::string(1, model.subtask.letter());
  c.meta["epochs"] = std::to_string(model.history.size());
  c.meta["use_topic"] = model.params.use_topic ? "1" : "0";
  c.meta["seq_len"] = std::to_string(a.seq_len);
  std::string fs;
  for (const int h : a.filter_sizes) fs += (fs.empty() ? "" : ",") + std::to_string(h);
  c.meta["filter_sizes"] = fs;
  c.meta["num_filters"] = std::to_string(a.num_filters);
  c.meta["lstm_units"] = std::to_string(a.lstm_units);
  c.meta["hidden"] = std::to_string(a.hidden);
  std::ostringstream dropout;
  dropout.precision(17);
  dropout << a.dropout;
  c.meta["dropout"] = dropout.str();
  return c;
}

TrainedModel model_from(const Checkpoint& ckpt, const Vocabulary& vocab) {
  TrainedModel m;
  m.emb = embeddings_from(ckpt, vocab);
  try {
    m.kind = parse_model_kind(ckpt.meta_at("kind"));
    m.subtask = Subtask::parse(ckpt.meta_at("subtask"));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(CheckpointError::Kind::Malformed, std::string("checkpoint: ") + e.what());
  }
  auto& a = m.arch;
  a.seq_len = meta_int(ckpt, "seq_len");
  a.filter_sizes.clear();
  std::istringstream fs(ckpt.meta_at("filter_sizes"));
  try {
    for (std::string h; std::getline(fs, h, ',');) a.filter_sizes.push_back(std::stoi(h));
    a.dropout = std::stod(ckpt.meta_at("dropout"));
  } catch (const std::logic_error&) {
    throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: bad architecture metadata");
  }
  a.num_filters = meta_int(ckpt, "num_filters");
  a.lstm_units = meta_int(ckpt, "lstm_units");
  a.hidden = meta_int(ckpt, "hidden");
  const bool use_topic = ckpt.meta_at("use_topic") == "1";
  const int d_in = m.emb.dim() + (use_topic ? m.emb.topic_dim() : 0);

  Rng unused(0);
  m.params = ModelParams<float>::init(m.kind, a, m.subtask.num_classes, d_in, use_topic, unused);
  for (auto& t : m.params.tensors()) copy_into(ckpt.at(t.name), t);
  m.history.resize(static_cast<std::size_t>(meta_int(ckpt, "epochs")));
  for (std::size_t i = 0; i < m.history.size(); ++i) m.history[i].epoch = static_cast<int>(i) + 1;
  return m;
}

}  // namespace tp
