#pragma once

// Binary checkpoint container and the mapping between trained models and it.
//
// Layout (all integers little-endian):
//   "NNCP1\n"
//   u32 array count
//   per array: u16 name length, name bytes, u8 rank, rank x u32 dims,
//              prod(dims) x f32 payload in row-major order
//   metadata: u16 name length, "__meta__", u32 byte length, UTF-8 `key=value` lines
// The metadata blob follows the arrays and is not included in the count.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tweetpolarity/train.hpp"

namespace tp {

class CheckpointError : public DataError {
 public:
  enum class Kind { BadMagic, Truncated, DimensionOverflow, Malformed, VocabMismatch };
  CheckpointError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct NamedArray {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};

struct Checkpoint {
  std::vector<NamedArray> arrays;
  std::map<std::string, std::string> meta;

  const NamedArray& at(const std::string& name) const;
  const std::string& meta_at(const std::string& key) const;
};

inline constexpr char kCheckpointMagic[] = "NNCP1\n";

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Embeddings alone, as written by the pretraining and distant phases.
Checkpoint embeddings_checkpoint(const EmbeddingMatrix<float>& emb, const Vocabulary& vocab, std::uint64_t seed);
EmbeddingMatrix<float> embeddings_from(const Checkpoint& ckpt, const Vocabulary& vocab);

Checkpoint model_checkpoint(const TrainedModel& model, const Vocabulary& vocab, std::uint64_t seed);
// Rebuilds the model; the stored vocabulary hash must match `vocab`.
TrainedModel model_from(const Checkpoint& ckpt, const Vocabulary& vocab);

}  // namespace tp
