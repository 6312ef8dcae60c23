#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jointsem/autodiff/optimizer.hpp"
#include "jointsem/core/sentence.hpp"
#include "jointsem/encoder/encoder.hpp"
#include "jointsem/inference/semi_markov.hpp"
#include "jointsem/pruning/rules.hpp"

namespace jointsem {

struct PrunerConfig {
  EncoderConfig encoder{32, 16, 16, 32, 1, 32};
  int max_span_length = 20;
  double word_dropout = 1.0;
};

/// Lightweight unlabeled model: span presence scored as w·MLP([h_i; h_j; φ])
/// under a semi-Markov distribution, arc presence as σ(w·MLP([h_h; h_d])).
template <typename S>
class Pruner {
 public:
  using E = autodiff::Expr<S>;
  using G = autodiff::Graph<S>;

  Pruner(const PrunerConfig& config, std::shared_ptr<const TokenVocabularies> vocab, std::mt19937_64& rng)
      : config_(config), vocab_(vocab) {
    using autodiff::ParameterKind;
    encoder_ = Encoder<S>(store_, "pruner", config.encoder, std::move(vocab), rng);
    const int w = encoder_.width();
    const int mlp = config.encoder.mlp;
    span_mlp_ = add_split_mlp(store_, "pruner/span", {w, w, 3}, mlp, mlp, rng);
    arc_mlp_ = add_split_mlp(store_, "pruner/arc", {w, w}, mlp, mlp, rng);
    span_out_ = store_.ensure("pruner/span/w", mlp, 1, ParameterKind::Weight, rng);
    arc_out_ = store_.ensure("pruner/arc/w", mlp, 1, ParameterKind::Weight, rng);
  }

  Pruner(const Pruner&) = delete;
  Pruner& operator=(const Pruner&) = delete;

  autodiff::ParameterStore<S>& store() { return store_; }
  const autodiff::ParameterStore<S>& store() const { return store_; }
  const PrunerConfig& config() const { return config_; }
  const TokenVocabularies& vocab() const { return *vocab_; }

  /// Spans of length ≤ max_span_length in (start, end) order, with score nodes.
  std::vector<std::pair<std::pair<int, int>, E>> span_scores(G& graph, const std::vector<E>& tokens,
                                                             int target_start) const {
    const int n = static_cast<int>(tokens.size());
    std::vector<E> starts, ends;
    for (int i = 0; i < n; ++i) {
      starts.push_back(mlp_project(graph, span_mlp_, 0, tokens[i]));
      ends.push_back(mlp_project(graph, span_mlp_, 1, tokens[i]));
    }
    std::vector<std::pair<std::pair<int, int>, E>> out;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n && j - i + 1 <= config_.max_span_length; ++j) {
        auto phi = discrete_features(i, j, target_start);
        autodiff::Matrix<S> features(3, 1);
        for (int k = 0; k < 3; ++k) features(k, 0) = static_cast<S>(phi[k]);
        E g = mlp_finish(graph, span_mlp_,
                         {starts[i], ends[j], mlp_project(graph, span_mlp_, 2, graph.input(features))});
        out.push_back({{i, j}, graph.inner(graph.parameter(span_out_), g)});
      }
    }
    return out;
  }

  /// All ordered token pairs (h ≠ d), with score nodes.
  std::vector<std::pair<std::pair<int, int>, E>> arc_scores(G& graph, const std::vector<E>& tokens) const {
    const int n = static_cast<int>(tokens.size());
    std::vector<E> heads, deps;
    for (int i = 0; i < n; ++i) {
      heads.push_back(mlp_project(graph, arc_mlp_, 0, tokens[i]));
      deps.push_back(mlp_project(graph, arc_mlp_, 1, tokens[i]));
    }
    std::vector<std::pair<std::pair<int, int>, E>> out;
    for (int h = 0; h < n; ++h) {
      for (int d = 0; d < n; ++d) {
        if (h == d) continue;
        E g = mlp_finish(graph, arc_mlp_, {heads[h], deps[d]});
        out.push_back({{h, d}, graph.inner(graph.parameter(arc_out_), g)});
      }
    }
    return out;
  }

  std::vector<E> encode(G& graph, const Sentence& sentence, std::mt19937_64* dropout = nullptr) const {
    return encoder_.encode(graph, sentence, config_.word_dropout, dropout);
  }

  std::vector<SpanPosterior> span_posteriors(const Sentence& sentence, const Target& target) const {
    G graph(const_cast<autodiff::ParameterStore<S>*>(&store_));
    auto scored = span_scores(graph, encode(graph, sentence), target.start);
    auto marginals = semi_markov_marginals(segments(scored), sentence.size());
    std::vector<SpanPosterior> out;
    for (std::size_t k = 0; k < scored.size(); ++k) {
      out.push_back({scored[k].first.first, scored[k].first.second, marginals.posteriors[k]});
    }
    return out;
  }

  std::vector<ArcPosterior> arc_posteriors(const Sentence& sentence) const {
    G graph(const_cast<autodiff::ParameterStore<S>*>(&store_));
    auto scored = arc_scores(graph, encode(graph, sentence));
    std::vector<ArcPosterior> out;
    for (const auto& [arc, node] : scored) {
      out.push_back({arc.first, arc.second, 1.0 / (1.0 + std::exp(-static_cast<double>(node.scalar())))});
    }
    return out;
  }

  /// log Z − score(gold segmentation) ≥ 0. Gold spans beyond the length cap
  /// are ignored.
  E span_loss(G& graph, const std::vector<E>& tokens, const Target& target,
              const std::set<std::pair<int, int>>& gold) const {
    auto scored = span_scores(graph, tokens, target.start);
    auto marginals = semi_markov_marginals(segments(scored), static_cast<int>(tokens.size()));
    std::vector<E> inputs;
    std::vector<autodiff::Matrix<S>> grads;
    double gold_score = 0.0;
    for (std::size_t k = 0; k < scored.size(); ++k) {
      bool in_gold = gold.count(scored[k].first) > 0;
      if (in_gold) gold_score += static_cast<double>(scored[k].second.scalar());
      inputs.push_back(scored[k].second);
      grads.push_back(autodiff::Matrix<S>::Constant(1, 1, static_cast<S>(marginals.posteriors[k] - in_gold)));
    }
    return graph.external(inputs, static_cast<S>(marginals.log_partition - gold_score), std::move(grads));
  }

  /// Σ over arcs of the logistic loss against gold presence.
  E arc_loss(G& graph, const std::vector<E>& tokens, const std::set<std::pair<int, int>>& gold) const {
    auto scored = arc_scores(graph, tokens);
    std::vector<E> inputs;
    std::vector<autodiff::Matrix<S>> grads;
    double loss = 0.0;
    for (const auto& [arc, node] : scored) {
      double s = static_cast<double>(node.scalar());
      double y = gold.count(arc) ? 1.0 : 0.0;
      // softplus(s) − y·s, computed stably.
      loss += std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))) - y * s;
      inputs.push_back(node);
      grads.push_back(autodiff::Matrix<S>::Constant(1, 1, static_cast<S>(1.0 / (1.0 + std::exp(-s)) - y)));
    }
    return graph.external(inputs, static_cast<S>(loss), std::move(grads));
  }

 private:
  static std::vector<Segment> segments(const std::vector<std::pair<std::pair<int, int>, E>>& scored) {
    std::vector<Segment> out;
    for (const auto& [span, node] : scored) out.push_back({span.first, span.second, static_cast<double>(node.scalar())});
    return out;
  }

  PrunerConfig config_;
  std::shared_ptr<const TokenVocabularies> vocab_;
  autodiff::ParameterStore<S> store_;
  Encoder<S> encoder_;
  SplitMlp span_mlp_, arc_mlp_;
  int span_out_ = -1, arc_out_ = -1;
};

template <typename S>
PruneReport prune_spans(const Pruner<S>& pruner, const Sentence& sentence, const Target& target,
                        const PruneConfig& config, const std::set<std::pair<int, int>>& gold = {}) {
  return select_spans(pruner.span_posteriors(sentence, target), sentence.size(), config, gold);
}

template <typename S>
PruneReport prune_arcs(const Pruner<S>& pruner, const Sentence& sentence, const PruneConfig& config,
                       const std::set<std::pair<int, int>>& gold = {}) {
  return select_arcs(pruner.arc_posteriors(sentence), config, gold);
}

struct PretrainOptions {
  int epochs = 5;
  double learning_rate = 0.33;
  std::uint64_t seed = 1;
};

struct PretrainReport {
  /// Mean instance loss per epoch.
  std::vector<double> epoch_loss;
};

/// Gold argument spans of each frame annotation and unlabeled non-top arcs of
/// each dependency graph, as pruner training targets.
inline std::set<std::pair<int, int>> gold_spans(const FrameParse& parse) {
  std::set<std::pair<int, int>> out;
  for (const auto& a : parse.arguments) out.insert({a.start, a.end});
  return out;
}
inline std::set<std::pair<int, int>> gold_arcs(const DependencyGraph& graph) {
  std::set<std::pair<int, int>> out;
  for (const auto& a : graph.arcs) out.insert({a.head, a.dependent});
  return out;
}

/// Trains span presence on frame-annotated sentences (one instance per
/// target) and arc presence on dependency-annotated sentences. Throws when
/// both corpora are empty.
template <typename S>
PretrainReport pretrain_pruner(Pruner<S>& pruner, const std::vector<Sentence>& frames,
                               const std::vector<Sentence>& graphs, const PretrainOptions& options) {
  struct Instance {
    const Sentence* sentence;
    const FrameParse* parse;
  };
  std::vector<Instance> instances;
  for (const Sentence& s : frames) {
    if (const auto* fa = s.frames()) {
      for (const auto& p : fa->parses) instances.push_back({&s, &p});
    }
  }
  for (const Sentence& s : graphs) {
    if (s.graph()) instances.push_back({&s, nullptr});
  }
  if (instances.empty()) throw std::invalid_argument("pruner pretraining needs a non-empty corpus");

  std::mt19937_64 rng(options.seed);
  PretrainReport report;
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t k : order) {
      const Instance& inst = instances[k];
      autodiff::Graph<S> graph(&pruner.store());
      auto tokens = pruner.encode(graph, *inst.sentence, &rng);
      auto loss = inst.parse ? pruner.span_loss(graph, tokens, inst.parse->target, gold_spans(*inst.parse))
                             : pruner.arc_loss(graph, tokens, gold_arcs(*inst.sentence->graph()));
      double value = static_cast<double>(loss.scalar());
      if (!std::isfinite(value)) throw std::runtime_error("non-finite pruner loss on '" + inst.sentence->id + "'");
      total += value;
      graph.backward(loss);
      autodiff::clip_and_step(pruner.store(), options.learning_rate);
    }
    report.epoch_loss.push_back(total / static_cast<double>(instances.size()));
  }
  return report;
}

}  // namespace jointsem
