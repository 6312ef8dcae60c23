#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jointsem/autodiff/graph.hpp"
#include "jointsem/core/candidate_space.hpp"
#include "jointsem/core/ontology.hpp"
#include "jointsem/encoder/encoder.hpp"
#include "jointsem/scorers/multilinear.hpp"

namespace jointsem {

/// Dependency label inventory; ids are dense from 0 (no UNK entry).
struct LabelSet {
  std::vector<std::string> names;
  std::map<std::string, int, std::less<>> ids;

  int add(const std::string& name) {
    auto [it, inserted] = ids.emplace(name, static_cast<int>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  }
  int id(std::string_view name) const {
    auto it = ids.find(name);
    return it == ids.end() ? -1 : it->second;
  }
  int size() const { return static_cast<int>(names.size()); }
};

struct ModelVocabularies {
  TokenVocabularies tokens;
  LabelSet labels;
  /// Labels never seen twice among one token's outgoing arcs in training.
  std::vector<int> deterministic_labels;
};

struct ModelConfig {
  EncoderConfig encoder;
  /// Width of frame, LU, role and dependency-label embeddings.
  int embedding = 100;
  int rank = 100;
  int max_span_length = 20;
  /// Frame instances carry latent dependency parts (and cross-task parts).
  bool joint = true;
  bool cross_task = true;
  bool top_arcs = true;
  double word_dropout = 1.0;
};

/// Optional candidate restrictions, typically produced by the pruner.
struct CandidateFilter {
  std::optional<std::set<std::pair<int, int>>> spans;
  std::optional<std::set<std::pair<int, int>>> arcs;
};

/// Encoder plus all part scorers over one parameter store.
///
/// predicate  = Σ_k (W_fr·g_fr)(W_tgt·g_tgt)(W_lu·g_lu)
/// argument   = Σ_k predicate_k (U_span·g_span)(U_role·g_role)
/// cross-task = Σ_k argument_k (V_w·w_arc)(V_arc·g_arc)
/// head / arc / labeled arc = w·MLP(...) with separate MLPs per part type.
template <typename S>
class Model {
 public:
  using E = autodiff::Expr<S>;
  using G = autodiff::Graph<S>;

  /// Per-sentence encoding shared by all candidate spaces of the sentence.
  struct Encoding {
    std::vector<E> tokens;
    SpanContext<S> spans;
    std::map<int, E> head_repr, arc_head, arc_dep, label_head, label_dep;
  };

  Model(const ModelConfig& config, Ontology ontology, std::shared_ptr<const ModelVocabularies> vocab,
        std::mt19937_64& rng, const std::string& prefix = "model")
      : config_(config), ontology_(std::move(ontology)), vocab_(std::move(vocab)) {
    using autodiff::ParameterKind;
    auto tokens = std::shared_ptr<const TokenVocabularies>(vocab_, &vocab_->tokens);
    encoder_ = Encoder<S>(store_, prefix, config.encoder, tokens, rng);
    const int width = encoder_.width();
    const int mlp = config.encoder.mlp;
    const int emb = config.embedding;
    const int r = config.rank;
    spans_ = SpanMlps<S>(store_, prefix, width, mlp, rng);
    auto table = [&](const std::string& name, int entries) {
      return store_.ensure(prefix + "/emb/" + name, emb, std::max(1, entries), ParameterKind::Lookup, rng);
    };
    frame_emb_ = table("frame", ontology_.num_frames());
    lu_emb_ = table("lu", ontology_.num_lus());
    role_emb_ = table("role", ontology_.num_roles());
    label_emb_ = table("label", vocab_->labels.size());
    auto factor = [&](const std::string& name, int cols) {
      return store_.ensure(prefix + "/rank/" + name, r, cols, ParameterKind::Weight, rng);
    };
    rank_frame_ = factor("frame", emb);
    rank_target_ = factor("target", mlp);
    rank_lu_ = factor("lu", emb);
    rank_span_ = factor("span", mlp);
    rank_role_ = factor("role", emb);
    rank_arc_weight_ = factor("arc_weight", mlp);
    rank_arc_ = factor("arc", mlp);
    head_mlp_ = add_split_mlp(store_, prefix + "/head", {width}, mlp, mlp, rng);
    arc_mlp_ = add_split_mlp(store_, prefix + "/arc", {width, width}, mlp, mlp, rng);
    label_mlp_ = add_split_mlp(store_, prefix + "/label", {width, width, emb}, mlp, mlp, rng);
    head_out_ = store_.ensure(prefix + "/head/w", mlp, 1, ParameterKind::Weight, rng);
    arc_out_ = store_.ensure(prefix + "/arc/w", mlp, 1, ParameterKind::Weight, rng);
    label_out_ = store_.ensure(prefix + "/label/w", mlp, 1, ParameterKind::Weight, rng);
    root_ = store_.ensure(prefix + "/root", width, 1, ParameterKind::Lookup, rng);
  }

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  autodiff::ParameterStore<S>& store() { return store_; }
  const autodiff::ParameterStore<S>& store() const { return store_; }
  const ModelConfig& config() const { return config_; }
  const Ontology& ontology() const { return ontology_; }
  const ModelVocabularies& vocab() const { return *vocab_; }
  std::shared_ptr<const ModelVocabularies> shared_vocab() const { return vocab_; }
  const Encoder<S>& encoder() const { return encoder_; }

  /// Candidate space for a frame instance (target given) or a dependency
  /// instance (no target). Frame instances get latent dependencies only when
  /// the model is joint with cross-task parts.
  CandidateSpace candidates(const Sentence& sentence, const Target* target,
                            const CandidateFilter& filter = {}) const {
    SpaceLimits limits;
    limits.max_span_length = config_.max_span_length;
    limits.cross_task = config_.cross_task;
    limits.top_arcs = config_.top_arcs;
    limits.num_labels = vocab_->labels.size();
    limits.dependencies = target == nullptr || (config_.joint && config_.cross_task);
    limits.allowed_spans = filter.spans;
    limits.allowed_arcs = filter.arcs;
    return build_candidate_space(sentence, target, ontology_, limits);
  }

  Encoding encode(G& graph, const Sentence& sentence, std::mt19937_64* dropout = nullptr) const {
    auto tokens = encoder_.encode(graph, sentence, config_.word_dropout, dropout);
    return Encoding{tokens, SpanContext<S>(graph, spans_, tokens), {}, {}, {}, {}, {}};
  }

  /// One score node per part of the space.
  std::vector<E> score(G& graph, Encoding& enc, const CandidateSpace& space) const {
    std::vector<E> out(space.size());
    std::map<int, E> argument_vec, arc_repr;
    const bool need_cross = !space.of_kind(PartKind::CrossTask).empty();

    if (const auto& target = space.target()) {
      E g_tgt = enc.spans.target(*target);
      E shared = cwise_product(graph.affine(graph.parameter(rank_target_), g_tgt),
                               graph.affine(graph.parameter(rank_lu_), graph.lookup(lu_emb_, space.lu())));
      std::map<int, E> predicate_vec, span_vec, role_vec;
      for (int p : space.of_kind(PartKind::Predicate)) {
        int f = std::get<PredicatePart>(space.part(p)).frame;
        E v = cwise_product(graph.affine(graph.parameter(rank_frame_), graph.lookup(frame_emb_, f)), shared);
        predicate_vec.emplace(f, v);
        out[p] = sum_elements(v);
      }
      for (int p : space.of_kind(PartKind::Argument)) {
        const auto& a = std::get<ArgumentPart>(space.part(p));
        int span_key = a.start * space.length() + a.end;
        auto s = span_vec.find(span_key);
        if (s == span_vec.end()) {
          E g = enc.spans.span(a.start, a.end, target->start);
          s = span_vec.emplace(span_key, graph.affine(graph.parameter(rank_span_), g)).first;
        }
        auto r = role_vec.find(a.role);
        if (r == role_vec.end()) {
          r = role_vec.emplace(a.role, graph.affine(graph.parameter(rank_role_), graph.lookup(role_emb_, a.role)))
                  .first;
        }
        E v = cwise_product(cwise_product(predicate_vec.at(a.frame), s->second), r->second);
        if (need_cross) argument_vec.emplace(p, v);
        out[p] = sum_elements(v);
      }
    }

    for (int p : space.of_kind(PartKind::Head)) {
      int h = std::get<HeadPart>(space.part(p)).token;
      auto it = enc.head_repr.find(h);
      if (it == enc.head_repr.end()) {
        it = enc.head_repr.emplace(h, mlp_apply(graph, head_mlp_, {enc.tokens.at(h)})).first;
      }
      out[p] = graph.inner(graph.parameter(head_out_), it->second);
    }
    for (int p : space.of_kind(PartKind::UnlabeledArc)) {
      const auto& arc = std::get<UnlabeledArcPart>(space.part(p));
      E g = mlp_finish(graph, arc_mlp_,
                       {projection(graph, enc, enc.arc_head, arc_mlp_, 0, arc.head),
                        projection(graph, enc, enc.arc_dep, arc_mlp_, 1, arc.dependent)});
      if (need_cross) arc_repr.emplace(p, g);
      out[p] = graph.inner(graph.parameter(arc_out_), g);
    }
    std::map<int, E> label_proj;
    for (int p : space.of_kind(PartKind::LabeledArc)) {
      const auto& arc = std::get<LabeledArcPart>(space.part(p));
      auto l = label_proj.find(arc.label);
      if (l == label_proj.end()) {
        l = label_proj.emplace(arc.label, mlp_project(graph, label_mlp_, 2, graph.lookup(label_emb_, arc.label)))
                .first;
      }
      E g = mlp_finish(graph, label_mlp_,
                       {projection(graph, enc, enc.label_head, label_mlp_, 0, arc.head),
                        projection(graph, enc, enc.label_dep, label_mlp_, 1, arc.dependent), l->second});
      out[p] = graph.inner(graph.parameter(label_out_), g);
    }
    if (need_cross) {
      E weight = graph.affine(graph.parameter(rank_arc_weight_), graph.parameter(arc_out_));
      std::map<int, E> arc_vec;
      for (int p : space.of_kind(PartKind::CrossTask)) {
        const auto& c = std::get<CrossTaskPart>(space.part(p));
        auto it = arc_vec.find(c.arc);
        if (it == arc_vec.end()) {
          it = arc_vec.emplace(c.arc, cwise_product(weight, graph.affine(graph.parameter(rank_arc_), arc_repr.at(c.arc))))
                   .first;
        }
        out[p] = sum_elements(cwise_product(argument_vec.at(c.argument), it->second));
      }
    }
    return out;
  }

  /// Scores without dropout, as plain numbers.
  std::vector<double> score_values(const Sentence& sentence, const CandidateSpace& space) const {
    G graph(const_cast<autodiff::ParameterStore<S>*>(&store_));
    Encoding enc = encode(graph, sentence);
    auto nodes = score(graph, enc, space);
    std::vector<double> out(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) out[k] = static_cast<double>(nodes[k].scalar());
    return out;
  }

  /// Overwrites the space's scores with score_values.
  void score_into(const Sentence& sentence, CandidateSpace& space) const {
    space.scores() = score_values(sentence, space);
  }

  /// Current rank factors as plain matrices.
  RankFactors<S> rank_factors() const {
    return {store_[rank_frame_].value, store_[rank_target_].value, store_[rank_lu_].value,
            store_[rank_span_].value,  store_[rank_role_].value,   store_[rank_arc_weight_].value,
            store_[rank_arc_].value};
  }

 private:
  E projection(G& graph, Encoding& enc, std::map<int, E>& cache, const SplitMlp& mlp, int block, int token) const {
    auto it = cache.find(token);
    if (it != cache.end()) return it->second;
    E h = token == kRoot ? graph.parameter(root_) : enc.tokens.at(token);
    return cache.emplace(token, mlp_project(graph, mlp, block, h)).first->second;
  }

  ModelConfig config_;
  Ontology ontology_;
  std::shared_ptr<const ModelVocabularies> vocab_;
  autodiff::ParameterStore<S> store_;
  Encoder<S> encoder_;
  SpanMlps<S> spans_;
  int frame_emb_ = -1, lu_emb_ = -1, role_emb_ = -1, label_emb_ = -1;
  int rank_frame_ = -1, rank_target_ = -1, rank_lu_ = -1, rank_span_ = -1, rank_role_ = -1,
      rank_arc_weight_ = -1, rank_arc_ = -1;
  SplitMlp head_mlp_, arc_mlp_, label_mlp_;
  int head_out_ = -1, arc_out_ = -1, label_out_ = -1;
  int root_ = -1;
};

/// Mean of the members' part scores on one space. Members must share the
/// ontology and vocabularies that produced the space.
template <typename S>
std::vector<double> ensemble_scores(const std::vector<const Model<S>*>& members, const Sentence& sentence,
                                    const CandidateSpace& space) {
  if (members.empty()) throw std::invalid_argument("ensemble needs at least one member");
  std::vector<double> mean(space.size(), 0.0);
  for (const Model<S>* m : members) {
    if (m->ontology().fingerprint() != members[0]->ontology().fingerprint() ||
        m->vocab().labels.names != members[0]->vocab().labels.names) {
      throw std::invalid_argument("ensemble members disagree on ontology or label inventory");
    }
    auto scores = m->score_values(sentence, space);
    for (int p = 0; p < space.size(); ++p) mean[p] += scores[p];
  }
  for (double& s : mean) s /= static_cast<double>(members.size());
  return mean;
}

}  // namespace jointsem
