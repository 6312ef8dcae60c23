#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jointsem/autodiff/lstm.hpp"
#include "jointsem/core/sentence.hpp"
#include "jointsem/encoder/mlp.hpp"
#include "jointsem/encoder/vocabulary.hpp"

namespace jointsem {

struct EncoderConfig {
  int word_dim = 100;
  int lemma_dim = 50;
  int pos_dim = 50;
  /// Per direction; token vectors are 2·hidden wide.
  int hidden = 100;
  int layers = 2;
  /// Hidden and output width of the span and target MLPs.
  int mlp = 100;
};

struct TokenVocabularies {
  Vocabulary words;
  Vocabulary lemmas;
  Vocabulary pos;
};

/// Probability of replacing a word seen `count` times in training by UNK.
inline double word_dropout_probability(double alpha, long count) {
  return alpha / (1.0 + static_cast<double>(count));
}

/// (log2(length+1), log2(|start−t|+1), log2(|end−t|+1)) for a span and the
/// first token t of its target.
inline std::array<double, 3> discrete_features(int start, int end, int target_start) {
  return {std::log2(static_cast<double>(end - start + 2)),
          std::log2(static_cast<double>(std::abs(start - target_start) + 1)),
          std::log2(static_cast<double>(std::abs(end - target_start) + 1))};
}

/// Word/lemma/POS lookups followed by a stacked BiLSTM.
template <typename S>
class Encoder {
 public:
  using E = autodiff::Expr<S>;

  Encoder() = default;
  Encoder(autodiff::ParameterStore<S>& store, const std::string& prefix, const EncoderConfig& config,
          std::shared_ptr<const TokenVocabularies> vocab, std::mt19937_64& rng)
      : config_(config), vocab_(std::move(vocab)) {
    const TokenVocabularies& v = *vocab_;
    using autodiff::ParameterKind;
    word_ = store.ensure(prefix + "/emb/word", config.word_dim, v.words.size(),
                             ParameterKind::Lookup, rng);
    lemma_ = store.ensure(prefix + "/emb/lemma", config.lemma_dim, v.lemmas.size(),
                              ParameterKind::Lookup, rng);
    pos_ = store.ensure(prefix + "/emb/pos", config.pos_dim, v.pos.size(),
                            ParameterKind::Lookup, rng);
    int input = config.word_dim + config.lemma_dim + config.pos_dim;
    for (int layer = 0; layer < config.layers; ++layer) {
      std::string name = prefix + "/lstm/" + std::to_string(layer);
      cells_.push_back({autodiff::add_lstm_cell(store, name + "/fw", input, config.hidden, rng),
                        autodiff::add_lstm_cell(store, name + "/bw", input, config.hidden, rng)});
      input = 2 * config.hidden;
    }
  }

  const EncoderConfig& config() const { return config_; }
  int width() const { return 2 * config_.hidden; }
  int word_table() const { return word_; }

  /// Concatenated word, lemma and POS vectors. With a dropout generator, each
  /// word is independently replaced by UNK with probability α/(1+count).
  std::vector<E> embed(autodiff::Graph<S>& graph, const Sentence& sentence, double alpha,
                       std::mt19937_64* dropout) const {
    std::vector<E> out;
    out.reserve(sentence.tokens.size());
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (const Token& tok : sentence.tokens) {
      int w = vocab_->words.id(tok.form);
      if (dropout != nullptr && w != Vocabulary::kUnk &&
          coin(*dropout) < word_dropout_probability(alpha, vocab_->words.count(w))) {
        w = Vocabulary::kUnk;
      }
      out.push_back(graph.concat({graph.lookup(word_, w), graph.lookup(lemma_, vocab_->lemmas.id(tok.lemma)),
                                  graph.lookup(pos_, vocab_->pos.id(tok.pos))}));
    }
    return out;
  }

  /// h_i = [forward_i; backward_i] of the top layer; each layer reads the
  /// previous layer's outputs.
  std::vector<E> contextualize(autodiff::Graph<S>& graph, std::vector<E> inputs) const {
    const int n = static_cast<int>(inputs.size());
    for (const auto& [fw, bw] : cells_) {
      std::vector<E> forward(n), backward(n);
      auto state = autodiff::lstm_initial_state(graph, fw);
      for (int i = 0; i < n; ++i) {
        state = autodiff::lstm_step(graph, fw, inputs[i], state);
        forward[i] = state.h;
      }
      state = autodiff::lstm_initial_state(graph, bw);
      for (int i = n - 1; i >= 0; --i) {
        state = autodiff::lstm_step(graph, bw, inputs[i], state);
        backward[i] = state.h;
      }
      for (int i = 0; i < n; ++i) inputs[i] = graph.concat({forward[i], backward[i]});
    }
    return inputs;
  }

  std::vector<E> encode(autodiff::Graph<S>& graph, const Sentence& sentence, double alpha = 0.0,
                        std::mt19937_64* dropout = nullptr) const {
    return contextualize(graph, embed(graph, sentence, alpha, dropout));
  }

 private:
  EncoderConfig config_;
  std::shared_ptr<const TokenVocabularies> vocab_;
  int word_ = -1, lemma_ = -1, pos_ = -1;
  std::vector<std::pair<autodiff::LstmCell, autodiff::LstmCell>> cells_;
};

/// Span and target MLPs over contextualized tokens:
/// span = MLP([h_i; h_j; φ]) and target = MLP([h_start; h_end; log2(len+1)]).
template <typename S>
struct SpanMlps {
  SplitMlp span;
  SplitMlp target;

  SpanMlps() = default;
  SpanMlps(autodiff::ParameterStore<S>& store, const std::string& prefix, int token_width, int width,
           std::mt19937_64& rng)
      : span(add_split_mlp(store, prefix + "/span", {token_width, token_width, 3}, width, width, rng)),
        target(add_split_mlp(store, prefix + "/target", {token_width, token_width, 1}, width, width, rng)) {}
};

/// Per-sentence cache of span and target representations.
template <typename S>
class SpanContext {
 public:
  using E = autodiff::Expr<S>;

  SpanContext(autodiff::Graph<S>& graph, const SpanMlps<S>& mlps, const std::vector<E>& tokens)
      : graph_(&graph), mlps_(&mlps), tokens_(tokens) {}

  E span(int start, int end, int target_start) {
    auto key = std::make_tuple(start, end, target_start);
    if (auto it = spans_.find(key); it != spans_.end()) return it->second;
    auto phi = discrete_features(start, end, target_start);
    autodiff::Matrix<S> features(3, 1);
    for (int k = 0; k < 3; ++k) features(k, 0) = static_cast<S>(phi[k]);
    E out = mlp_finish(*graph_, mlps_->span,
                       {start_projection(start), end_projection(end),
                        mlp_project(*graph_, mlps_->span, 2, graph_->input(features))});
    spans_.emplace(key, out);
    return out;
  }

  E target(const Target& t) {
    auto key = std::make_pair(t.start, t.end);
    if (auto it = targets_.find(key); it != targets_.end()) return it->second;
    E length = graph_->input(static_cast<S>(std::log2(static_cast<double>(t.end - t.start + 2))));
    E out = mlp_apply(*graph_, mlps_->target, {tokens_.at(t.start), tokens_.at(t.end), length});
    targets_.emplace(key, out);
    return out;
  }

 private:
  E start_projection(int i) {
    auto [it, inserted] = starts_.try_emplace(i);
    if (inserted) it->second = mlp_project(*graph_, mlps_->span, 0, tokens_.at(i));
    return it->second;
  }
  E end_projection(int j) {
    auto [it, inserted] = ends_.try_emplace(j);
    if (inserted) it->second = mlp_project(*graph_, mlps_->span, 1, tokens_.at(j));
    return it->second;
  }

  autodiff::Graph<S>* graph_;
  const SpanMlps<S>* mlps_;
  std::vector<E> tokens_;
  std::map<std::tuple<int, int, int>, E> spans_;
  std::map<std::pair<int, int>, E> targets_;
  std::map<int, E> starts_, ends_;
};

}  // namespace jointsem
