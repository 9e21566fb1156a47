#pragma once

// Distant and supervised training phases with freeze/unfreeze schedules.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tweetpolarity/corpus.hpp"
#include "tweetpolarity/models.hpp"

namespace tp {

enum class Phase { Distant, Supervised };

std::string_view to_string(Phase phase);

struct TrainSchedule {
  Phase phase = Phase::Supervised;
  int frozen_epochs = 5;
  int unfrozen_epochs = 5;
  double lr_initial = 1e-3;
  double lr_unfrozen_scale = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 1;

  static TrainSchedule distant();     // 1 frozen + 6 unfrozen, lr unchanged
  static TrainSchedule supervised();  // 5 frozen + 5 unfrozen, lr / 10 after unfreezing

  int total_epochs() const { return frozen_epochs + unfrozen_epochs; }
  bool frozen_at(int epoch) const { return epoch <= frozen_epochs; }  // epochs count from 1
  double lr_at(int epoch) const { return frozen_at(epoch) ? lr_initial : lr_initial * lr_unfrozen_scale; }
  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  Phase phase = Phase::Supervised;
  bool frozen = false;
  double lr = 0.0;         // learning rate held by the optimizer state during the epoch
  double loss = 0.0;       // mean weighted training loss, dropout active
  double accuracy = 0.0;   // argmax accuracy of a dropout-free pass after the epoch
};

// Called after every epoch with the embeddings as they stand.
using EpochHook = std::function<void(const EpochStats&, const EmbeddingMatrix<float>&)>;

struct TrainHooks {
  std::ostream* log = nullptr;  // receives `epoch<TAB>phase<TAB>loss<TAB>acc`
  EpochHook on_epoch;
};

struct TrainedModel {
  ModelKind kind = ModelKind::Cnn;
  Subtask subtask;
  ArchConfig arch;
  ModelParams<float> params;
  EmbeddingMatrix<float> emb;
  std::vector<EpochStats> history;
};

struct DistantResult {
  EmbeddingMatrix<float> emb;
  std::vector<EpochStats> history;
};

// Fine-tunes `emb` with a throwaway binary CNN (negative = 0, positive = 1),
// unweighted loss.
DistantResult distant_train(const EmbeddingMatrix<float>& emb, const Vocabulary& vocab, const DistantSet& data,
                            const ArchConfig& arch, const TrainSchedule& sched, const TrainHooks& hooks = {});

// Class-weighted training of a fresh classifier on top of `emb`.
TrainedModel supervised_train(ModelKind kind, const Subtask& subtask, std::span<const Example> data,
                              const Vocabulary& vocab, const EmbeddingMatrix<float>& emb, const ArchConfig& arch,
                              const TrainSchedule& sched, const TrainHooks& hooks = {});

// Dropout-free class probabilities, one vector per tweet.
std::vector<Vector<float>> predict(const TrainedModel& model, const Vocabulary& vocab,
                                   std::span<const TokenizedTweet> tweets);
std::vector<Vector<float>> predict(const TrainedModel& model, const Vocabulary& vocab,
                                   std::span<const Example> examples);

}  // namespace tp
