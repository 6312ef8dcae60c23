#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jointsem/core/cost.hpp"
#include "jointsem/inference/ad3.hpp"
#include "jointsem/inference/decode.hpp"
#include "jointsem/io/embeddings.hpp"
#include "jointsem/model/model.hpp"
#include "jointsem/pruning/pruner.hpp"

namespace jointsem {

struct TrainConfig {
  double learning_rate = 0.33;
  int anneal_every = 10;
  double anneal_rate = 0.5;
  int epochs = 30;
  double clip = 1.0;
  double l2 = 1e-6;
  /// ℓ1 weight on cross-task scores.
  double lambda = 0.01;
  double exemplar_fraction = 0.35;
  std::uint64_t seed = 1;
  CostConfig cost;
  /// Cross-task parts with |score| at or below this are not decoded.
  double drop_epsilon = 1e-3;
  Ad3Options solver;
  PruneConfig prune;
  /// Dev-set prediction threads; 0 = hardware concurrency.
  int threads = 0;
};

/// lr0 · rate^⌊epoch / anneal_every⌋ (epochs counted from 0).
double learning_rate_at(const TrainConfig& config, int epoch);

struct Corpora {
  std::vector<Sentence> fn_train;
  /// Sampled afresh each epoch (exemplar_fraction of them).
  std::vector<Sentence> fn_exemplars;
  std::vector<Sentence> fn_dev;
  std::vector<Sentence> dm_train;
  std::vector<Sentence> dm_dev;
};

/// Token vocabularies with training counts (exemplars included), words from
/// the embedding table with count 0, and the dependency label inventory.
ModelVocabularies build_vocabularies(const Corpora& corpora, const EmbeddingTable* embeddings = nullptr);

/// Labels never attached to two outgoing arcs of the same token.
std::vector<int> deterministic_labels(const std::vector<Sentence>& graphs, const LabelSet& labels);

/// Copies pretrained vectors into the word table. Throws on a width mismatch.
void initialize_word_embeddings(Model<double>& model, const EmbeddingTable& table);

/// Part scorer used for prediction; the default is the model's own scores,
/// ensembles substitute averaged scores.
using PartScorer = std::function<std::vector<double>(const Sentence&, const CandidateSpace&)>;

struct Predictor {
  const Model<double>* model = nullptr;
  PartScorer scorer;
  const Pruner<double>* pruner = nullptr;
  PruneConfig prune;
  DecodeOptions options;
  double drop_epsilon = 1e-3;
  /// Worker threads for corpus(); 0 = hardware concurrency.
  int threads = 1;

  explicit Predictor(const Model<double>& m);
  CandidateFilter filter(const Sentence& sentence, const Target* target) const;
  /// One parse per target, from a joint decode of each target's space.
  std::vector<FrameParse> frames(const Sentence& sentence, const std::vector<Target>& targets) const;
  DependencyGraph graph(const Sentence& sentence) const;
  /// Frame-annotated inputs get frames for their targets; every other
  /// sentence gets a dependency graph. Output order follows the input.
  std::vector<Sentence> corpus(const std::vector<Sentence>& input) const;
};

struct EpochRecord {
  int epoch = 0;
  double learning_rate = 0.0;
  double mean_loss = 0.0;
  double dev_fn_f1 = 0.0;
  double dev_sdp_f1 = 0.0;
  double seconds = 0.0;
};

/// Tab-separated: epoch, lr, mean loss, dev FN F1, dev SDP F1, seconds.
std::string metric_line(const EpochRecord& record);

struct TrainResult {
  std::vector<EpochRecord> log;
  /// Epoch whose parameters the model holds on return.
  int best_epoch = -1;
  double best_dev_fn_f1 = -1.0;
};

/// Per-instance SGD over the shuffled union of frame instances (full set plus
/// sampled exemplars) and, for joint models, dependency instances. Frame
/// instances use the latent hinge (plus the ℓ1 cross-task penalty),
/// dependency instances the structured hinge. After each epoch the dev sets
/// are decoded; the parameters of the epoch with the best frame dev F1 are
/// kept (the earlier epoch on ties; the last epoch without a frame dev set).
/// Throws on a non-finite loss, naming the instance.
TrainResult train(Model<double>& model, const Corpora& corpora, const TrainConfig& config,
                  const Pruner<double>* pruner = nullptr,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace jointsem
