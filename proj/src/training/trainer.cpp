#include "jointsem/training/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "jointsem/core/error.hpp"
#include "jointsem/eval/metrics.hpp"
#include "jointsem/inference/decode.hpp"
#include "jointsem/training/losses.hpp"

namespace jointsem {

double learning_rate_at(const TrainConfig& config, int epoch) {
  return config.learning_rate * std::pow(config.anneal_rate, epoch / std::max(1, config.anneal_every));
}

ModelVocabularies build_vocabularies(const Corpora& corpora, const EmbeddingTable* embeddings) {
  ModelVocabularies vocab;
  auto count_tokens = [&](const std::vector<Sentence>& corpus) {
    for (const Sentence& s : corpus) {
      for (const Token& t : s.tokens) {
        vocab.tokens.words.add(t.form);
        vocab.tokens.lemmas.add(t.lemma);
        vocab.tokens.pos.add(t.pos);
      }
    }
  };
  count_tokens(corpora.fn_train);
  count_tokens(corpora.fn_exemplars);
  count_tokens(corpora.dm_train);
  if (embeddings != nullptr) {
    for (const auto& [word, vec] : embeddings->vectors) vocab.tokens.words.add(word, 0);
  }
  for (const Sentence& s : corpora.dm_train) {
    if (const auto* g = s.graph()) {
      for (const Arc& a : g->arcs) vocab.labels.add(a.label);
    }
  }
  vocab.deterministic_labels = deterministic_labels(corpora.dm_train, vocab.labels);
  return vocab;
}

std::vector<int> deterministic_labels(const std::vector<Sentence>& graphs, const LabelSet& labels) {
  std::vector<char> repeated(labels.size(), 0);
  for (const Sentence& s : graphs) {
    const auto* g = s.graph();
    if (!g) continue;
    std::map<std::pair<int, int>, int> seen;
    for (const Arc& a : g->arcs) {
      int l = labels.id(a.label);
      if (l >= 0 && ++seen[{a.head, l}] > 1) repeated[l] = 1;
    }
  }
  std::vector<int> out;
  for (int l = 0; l < labels.size(); ++l) {
    if (!repeated[l]) out.push_back(l);
  }
  return out;
}

void initialize_word_embeddings(Model<double>& model, const EmbeddingTable& table) {
  auto& words = model.store()[model.encoder().word_table()].value;
  if (table.vectors.empty()) return;
  if (table.dimension != words.rows()) {
    throw ValidationError("embedding dimension " + std::to_string(table.dimension) +
                          " does not match the word embedding width " + std::to_string(words.rows()));
  }
  const auto& vocab = model.vocab().tokens.words;
  for (const auto& [word, vec] : table.vectors) {
    if (vocab.contains(word)) words.col(vocab.id(word)) = vec;
  }
}

Predictor::Predictor(const Model<double>& m) : model(&m) {
  scorer = [&m](const Sentence& s, const CandidateSpace& space) { return m.score_values(s, space); };
  options.deterministic_labels = m.vocab().deterministic_labels;
}

CandidateFilter Predictor::filter(const Sentence& sentence, const Target* target) const {
  CandidateFilter f;
  if (pruner == nullptr) return f;
  bool deps = target == nullptr || (model->config().joint && model->config().cross_task);
  if (deps) f.arcs = prune_arcs(*pruner, sentence, prune).retained;
  if (target != nullptr) f.spans = prune_spans(*pruner, sentence, *target, prune).retained;
  return f;
}

std::vector<FrameParse> Predictor::frames(const Sentence& sentence, const std::vector<Target>& targets) const {
  std::vector<FrameParse> out;
  for (const Target& t : targets) {
    CandidateSpace space = model->candidates(sentence, &t, filter(sentence, &t));
    space.scores() = scorer(sentence, space);
    DecodeOptions joint = options;
    joint.mode = DecodeMode::Joint;
    joint.drop_epsilon = drop_epsilon;
    Decoded d = decode(space, joint);
    auto parse = frame_parse_of(space, d.parts, model->ontology());
    if (!parse) throw std::runtime_error("decoder produced no frame for target '" + t.lu + "'");
    out.push_back(std::move(*parse));
  }
  return out;
}

DependencyGraph Predictor::graph(const Sentence& sentence) const {
  CandidateSpace space = model->candidates(sentence, nullptr, filter(sentence, nullptr));
  space.scores() = scorer(sentence, space);
  DecodeOptions deps = options;
  deps.mode = DecodeMode::DependenciesOnly;
  Decoded d = decode(space, deps);
  return dependency_graph_of(space, d.parts, model->vocab().labels.names);
}

std::vector<Sentence> Predictor::corpus(const std::vector<Sentence>& input) const {
  std::vector<Sentence> out(input.size());
  auto predict = [&](std::size_t k) {
    const Sentence& s = input[k];
    Sentence p{s.id, s.tokens, {}};
    if (const auto* fa = s.frames()) {
      std::vector<Target> targets;
      for (const auto& parse : fa->parses) targets.push_back(parse.target);
      p.supervision = FrameAnnotations{frames(s, targets)};
    } else {
      p.supervision = graph(s);
    }
    out[k] = std::move(p);
  };
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, input.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < input.size(); ++k) predict(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k; (k = next++) < input.size();) predict(k);
      } catch (...) {
        errors[w] = std::current_exception();
        next = input.size();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string metric_line(const EpochRecord& r) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, "%d\t%.6g\t%.6f\t%.4f\t%.4f\t%.3f", r.epoch, r.learning_rate, r.mean_loss,
                r.dev_fn_f1, r.dev_sdp_f1, r.seconds);
  return buffer;
}

namespace {

/// Loss of one instance (all targets of a frame sentence, or one dependency
/// sentence), accumulated into parameter gradients.
double train_instance(Model<double>& model, const Sentence& sentence, const TrainConfig& config,
                      const Predictor& predictor, const LossOptions& options, std::mt19937_64& rng) {
  autodiff::Graph<double> graph(&model.store());
  auto enc = model.encode(graph, sentence, &rng);
  std::vector<autodiff::Expr<double>> terms;
  if (const auto* fa = sentence.frames()) {
    for (const FrameParse& parse : fa->parses) {
      CandidateSpace space = model.candidates(sentence, &parse.target, predictor.filter(sentence, &parse.target));
      auto gold = gold_frame_parts(space, parse, model.ontology());
      if (gold.empty() || kind_of(space.part(gold.front())) != PartKind::Predicate) continue;
      auto scores = model.score(graph, enc, space);
      std::span<const autodiff::Expr<double>> view(scores);
      terms.push_back(latent_hinge_loss(graph, view, space, gold, options).node);
      if (!space.of_kind(PartKind::CrossTask).empty()) terms.push_back(l1_penalty(graph, view, space, config.lambda));
    }
  } else if (const auto* g = sentence.graph()) {
    CandidateSpace space = model.candidates(sentence, nullptr, predictor.filter(sentence, nullptr));
    const auto& labels = model.vocab().labels;
    auto gold = gold_dependency_parts(space, *g, [&](const std::string& l) { return labels.id(l); });
    auto scores = model.score(graph, enc, space);
    terms.push_back(sdp_hinge_loss(graph, std::span<const autodiff::Expr<double>>(scores), space, gold, options).node);
  }
  if (terms.empty()) return 0.0;
  auto loss = graph.sum(terms);
  double value = loss.scalar();
  if (!std::isfinite(value)) throw std::runtime_error("non-finite loss on instance '" + sentence.id + "'");
  graph.backward(loss);
  return value;
}

}  // namespace

TrainResult train(Model<double>& model, const Corpora& corpora, const TrainConfig& config,
                  const Pruner<double>* pruner, const std::function<void(const EpochRecord&)>& on_epoch) {
  if (corpora.fn_train.empty() && corpora.fn_exemplars.empty() && corpora.dm_train.empty()) {
    throw ValidationError("training needs at least one non-empty corpus");
  }
  auto& store = model.store();
  store.l2 = config.l2;
  store.clip = config.clip;
  const bool use_dm = model.config().joint;

  Predictor predictor(model);
  predictor.pruner = pruner;
  predictor.prune = config.prune;
  predictor.options.solver = config.solver;
  predictor.drop_epsilon = config.drop_epsilon;
  predictor.threads = config.threads;
  LossOptions options;
  options.cost = config.cost;
  options.decode = predictor.options;
  options.decode.drop_epsilon = config.drop_epsilon;

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  std::vector<autodiff::Matrix<double>> best_values;
  auto snapshot = [&] {
    best_values.clear();
    for (const auto& p : store) best_values.push_back(p.value);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto start = std::chrono::steady_clock::now();
    EpochRecord record;
    record.epoch = epoch;
    record.learning_rate = learning_rate_at(config, epoch);

    std::vector<const Sentence*> instances;
    for (const Sentence& s : corpora.fn_train) instances.push_back(&s);
    if (!corpora.fn_exemplars.empty()) {
      std::vector<const Sentence*> pool;
      for (const Sentence& s : corpora.fn_exemplars) pool.push_back(&s);
      std::shuffle(pool.begin(), pool.end(), rng);
      auto take = static_cast<std::size_t>(std::llround(config.exemplar_fraction * static_cast<double>(pool.size())));
      instances.insert(instances.end(), pool.begin(), pool.begin() + std::min(take, pool.size()));
    }
    if (use_dm) {
      for (const Sentence& s : corpora.dm_train) instances.push_back(&s);
    }
    std::shuffle(instances.begin(), instances.end(), rng);

    double total = 0.0;
    for (const Sentence* s : instances) {
      total += train_instance(model, *s, config, predictor, options, rng);
      autodiff::clip_and_step(store, record.learning_rate);
    }
    record.mean_loss = instances.empty() ? 0.0 : total / static_cast<double>(instances.size());

    if (!corpora.fn_dev.empty()) {
      record.dev_fn_f1 = eval_frames(corpora.fn_dev, predictor.corpus(corpora.fn_dev), model.ontology()).parts.f1();
    }
    if (use_dm && !corpora.dm_dev.empty()) {
      record.dev_sdp_f1 = eval_sdp(corpora.dm_dev, predictor.corpus(corpora.dm_dev)).f1();
    }
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(record);

    bool improved = corpora.fn_dev.empty() || record.dev_fn_f1 > result.best_dev_fn_f1;
    if (improved) {
      result.best_epoch = epoch;
      result.best_dev_fn_f1 = record.dev_fn_f1;
      snapshot();
    }
    if (on_epoch) on_epoch(record);
  }
  if (!best_values.empty()) {
    int k = 0;
    for (auto& p : store) p.value = best_values[k++];
  }
  return result;
}

}  // namespace jointsem
