#include <doctest.h>

#include <memory>
#include <random>

#include "jointsem/pruning/pruner.hpp"
#include "jointsem/pruning/rules.hpp"
#include "support.hpp"

using namespace jointsem;
using jointsem::testing::sentence;

namespace {

std::shared_ptr<TokenVocabularies> vocab_of(const std::vector<std::string>& words) {
  auto v = std::make_shared<TokenVocabularies>();
  for (const auto& w : words) {
    v->words.add(w);
    v->lemmas.add(w);
    v->pos.add("NN");
  }
  return v;
}

PrunerConfig small_pruner() {
  PrunerConfig c;
  c.encoder = EncoderConfig{6, 4, 4, 6, 1, 8};
  c.word_dropout = 0.0;
  return c;
}

}  // namespace

TEST_CASE("span threshold is 1/n²") {
  CHECK(span_threshold(2) == 0.25);
  CHECK(span_threshold(10) == 0.01);
  CHECK(span_threshold(1) == 1.0);
}

TEST_CASE("span selection") {
  PruneConfig config;
  SUBCASE("posterior at the threshold is kept, just below is pruned") {
    std::vector<SpanPosterior> p{{0, 0, 0.25}, {1, 1, std::nextafter(0.25, 0.0)}, {0, 1, 0.9}};
    auto report = select_spans(p, 2, config);
    CHECK(report.retained == std::set<std::pair<int, int>>{{0, 0}, {0, 1}});
  }
  SUBCASE("a span of 21 tokens is pruned whatever its posterior") {
    std::vector<SpanPosterior> p{{0, 20, 1.0}, {0, 19, 1.0}, {1, 20, 1.0}};
    auto report = select_spans(p, 25, config);
    CHECK(report.retained == std::set<std::pair<int, int>>{{0, 19}, {1, 20}});
  }
  SUBCASE("recall against gold") {
    std::vector<SpanPosterior> p{{0, 0, 0.5}, {1, 1, 0.01}};
    auto report = select_spans(p, 2, config, {{0, 0}, {1, 1}});
    CHECK(report.gold == 2);
    CHECK(report.gold_retained == 1);
    CHECK(report.recall == 0.5);
    CHECK(select_spans(p, 2, config).recall == 1.0);
  }
}

TEST_CASE("arc selection") {
  std::vector<ArcPosterior> p{{1, 0, 0.3}, {2, 0, 0.6}, {0, 1, 0.05}, {2, 1, 0.5}, {0, 2, 0.2}, {1, 2, 0.2}};
  SUBCASE("K ≥ n−1 and floor 0 keep everything") {
    PruneConfig config;
    config.top_k = 2;
    config.arc_floor = 0.0;
    CHECK(select_arcs(p, config).retained.size() == p.size());
  }
  SUBCASE("K = 1 keeps each dependent's best head, ties to the smaller head") {
    PruneConfig config;
    config.top_k = 1;
    config.arc_floor = 0.0;
    auto kept = select_arcs(p, config).retained;
    CHECK(kept == std::set<std::pair<int, int>>{{2, 0}, {2, 1}, {0, 2}});
  }
  SUBCASE("the floor is strict") {
    PruneConfig config;
    config.arc_floor = 0.2;
    auto kept = select_arcs(p, config).retained;
    CHECK(kept == std::set<std::pair<int, int>>{{1, 0}, {2, 0}, {2, 1}});
  }
}

TEST_CASE("pruner pretraining") {
  auto vocab = vocab_of({"the", "dog", "ran", "home", "fast"});
  std::mt19937_64 rng(31);
  Pruner<double> pruner(small_pruner(), vocab, rng);
  auto s = jointsem::testing::with_frames(
      sentence({"the", "dog", "ran", "home", "fast"}),
      {FrameParse{{2, 2, "run.v"}, "Self_motion", {{0, 1, "Self_mover"}, {3, 3, "Goal"}}}});
  const Target& target = s.frames()->parses[0].target;

  SUBCASE("zero epochs leave the parameters at initialization") {
    std::vector<autodiff::Matrix<double>> before;
    for (const auto& p : pruner.store()) before.push_back(p.value);
    PretrainOptions options;
    options.epochs = 0;
    auto report = pretrain_pruner(pruner, {s}, {}, options);
    CHECK(report.epoch_loss.empty());
    int k = 0;
    for (const auto& p : pruner.store()) CHECK(p.value == before[k++]);
  }

  SUBCASE("the span loss is log Z minus the gold score, hence nonnegative") {
    autodiff::Graph<double> g(&pruner.store());
    auto tokens = pruner.encode(g, s);
    auto loss = pruner.span_loss(g, tokens, target, gold_spans(s.frames()->parses[0]));
    CHECK(loss.scalar() >= 0.0);
  }

  SUBCASE("overfitting one sentence raises the gold span posterior every epoch") {
    auto posterior_of = [&](std::pair<int, int> span) {
      for (const auto& p : pruner.span_posteriors(s, target)) {
        if (p.start == span.first && p.end == span.second) return p.posterior;
      }
      return -1.0;
    };
    PretrainOptions options;
    options.epochs = 1;
    options.learning_rate = 0.05;
    double previous = posterior_of({0, 1});
    for (int epoch = 0; epoch < 60; ++epoch) {
      options.seed = static_cast<std::uint64_t>(epoch + 1);
      pretrain_pruner(pruner, {s}, {}, options);
      double now = posterior_of({0, 1});
      CHECK(now > previous);
      previous = now;
    }
    CHECK(previous > 0.5);
    auto report = prune_spans(pruner, s, target, PruneConfig{}, gold_spans(s.frames()->parses[0]));
    CHECK(report.recall == 1.0);
  }

  SUBCASE("arc training raises gold arc posteriors") {
    auto g = jointsem::testing::with_graph(sentence({"the", "dog", "ran"}), DependencyGraph{2, {{0, 1, "BV"}, {2, 1, "ARG1"}}});
    auto mean_gold = [&] {
      double sum = 0.0;
      for (const auto& a : pruner.arc_posteriors(g)) {
        if ((a.head == 0 && a.dependent == 1) || (a.head == 2 && a.dependent == 1)) sum += a.posterior;
      }
      return sum / 2;
    };
    double before = mean_gold();
    PretrainOptions options;
    options.epochs = 10;
    options.learning_rate = 0.2;
    pretrain_pruner(pruner, {}, {g}, options);
    CHECK(mean_gold() > before);
    CHECK(mean_gold() > 0.5);
  }

  SUBCASE("empty corpora are rejected") {
    CHECK_THROWS_AS(pretrain_pruner(pruner, {}, {}, PretrainOptions{}), std::invalid_argument);
  }
}
