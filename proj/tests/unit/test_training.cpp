#include <doctest.h>

#include <random>

#include "jointsem/autodiff/grad_check.hpp"
#include "jointsem/core/error.hpp"
#include "jointsem/data/synthetic.hpp"
#include "jointsem/training/losses.hpp"
#include "jointsem/training/trainer.hpp"
#include "model_support.hpp"

using namespace jointsem;
using jointsem::testing::sentence;
using E = autodiff::Expr<double>;

namespace {

std::vector<E> inputs_of(autodiff::Graph<double>& g, const std::vector<double>& scores) {
  std::vector<E> out;
  for (double s : scores) out.push_back(g.input(s));
  return out;
}

/// max over feasible structures of [S + δ] − S(gold), by enumerating every
/// assignment of the dependency-only factor graph.
double enumerated_sdp_hinge(const CandidateSpace& space, const std::vector<double>& scores, std::vector<int> gold,
                            const CostConfig& cost) {
  DecodeOptions options;
  options.mode = DecodeMode::DependenciesOnly;
  auto built = build_factor_graph(space, scores, options);
  const int n = built.graph.num_variables();
  REQUIRE(n <= 16);
  std::sort(gold.begin(), gold.end());
  double best = -1e300;
  std::vector<char> a(n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    for (int v = 0; v < n; ++v) a[v] = (mask >> v) & 1;
    if (!built.graph.feasible(a)) continue;
    std::vector<int> parts;
    for (int v = 0; v < n; ++v)
      if (a[v]) parts.push_back(built.graph.part[v]);
    best = std::max(best, total_score(scores, parts) + weighted_hamming(parts, gold, cost));
  }
  return std::max(0.0, best - total_score(scores, gold));
}

}  // namespace

TEST_CASE("learning-rate schedule") {
  TrainConfig config;
  for (int e = 0; e < 10; ++e) CHECK(learning_rate_at(config, e) == 0.33);
  for (int e = 10; e < 20; ++e) CHECK(learning_rate_at(config, e) == 0.165);
  CHECK(learning_rate_at(config, 20) == 0.0825);
}

TEST_CASE("latent hinge") {
  Ontology o;
  o.add_frame("F", {"A"});
  o.add_frame("G", {"B"});
  o.add_lu("w.v", {"F", "G"});
  o.add_lu("u.v", {"F"});

  SUBCASE("zero model with one gold and one non-gold part gives 0.4") {
    Target t{0, 0, "u.v"};
    SpaceLimits limits;
    limits.dependencies = false;
    auto space = build_candidate_space(sentence({"w"}), &t, o, limits);
    REQUIRE(space.size() == 2);
    autodiff::Graph<double> g;
    auto scores = inputs_of(g, {0.0, 0.0});
    auto loss = latent_hinge_loss<double>(g, scores, space, {space.predicate_index(0)});
    CHECK(loss.value == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(loss.node.scalar() == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("gold best by more than every cost gives 0") {
    Target t{0, 0, "w.v"};
    SpaceLimits limits;
    limits.dependencies = false;
    auto space = build_candidate_space(sentence({"w"}), &t, o, limits);
    std::vector<double> values(space.size(), -5.0);
    int f = space.predicate_index(0), arg = space.argument_index(0, 0, 0, o.role_id("A"));
    values[f] = 5.0;
    values[arg] = 5.0;
    autodiff::Graph<double> g;
    auto scores = inputs_of(g, values);
    auto loss = latent_hinge_loss<double>(g, scores, space, {f, arg});
    CHECK(loss.value == 0.0);
    CHECK(loss.predicted == std::vector<int>{std::min(f, arg), std::max(f, arg)});
  }
  SUBCASE("zero costs leave a nonnegative loss that maximizes over latent dependencies") {
    Target t{1, 1, "w.v"};
    SpaceLimits limits;
    limits.num_labels = 1;
    auto space = build_candidate_space(sentence({"a", "w", "b"}), &t, o, limits);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    LossOptions options;
    options.cost = CostConfig{0.0, 0.0};
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> values(space.size());
      for (double& v : values) v = normal(rng);
      autodiff::Graph<double> g;
      auto scores = inputs_of(g, values);
      auto loss = latent_hinge_loss<double>(g, scores, space, {space.predicate_index(1)}, options);
      CHECK(loss.value >= 0.0);
      CHECK(loss.status == SolveStatus::Exact);
    }
  }
}

TEST_CASE("structured hinge for dependencies") {
  auto s = sentence({"a", "b"});
  SpaceLimits limits;
  limits.heads = false;
  limits.top_arcs = false;
  auto space = build_candidate_space(s, nullptr, Ontology{}, limits);
  REQUIRE(space.size() == 2);
  int gold = space.arc_index(0, 1);

  SUBCASE("zero model, one gold and one non-gold arc: δ of the cost-maximizing structure") {
    autodiff::Graph<double> g;
    auto scores = inputs_of(g, {0.0, 0.0});
    auto loss = sdp_hinge_loss<double>(g, scores, space, {gold});
    double expected = enumerated_sdp_hinge(space, {0.0, 0.0}, {gold}, {});
    // Dropping the gold arc (0.6) and adding the other (0.4).
    CHECK(expected == doctest::Approx(1.0));
    CHECK(loss.value == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("separation with margin gives 0") {
    std::vector<double> values(2, -2.0);
    values[gold] = 2.0;
    autodiff::Graph<double> g;
    auto scores = inputs_of(g, values);
    CHECK(sdp_hinge_loss<double>(g, scores, space, {gold}).value == 0.0);
  }
  SUBCASE("matches enumeration on random labeled spaces") {
    SpaceLimits labeled;
    labeled.num_labels = 2;
    labeled.heads = true;
    auto full = build_candidate_space(sentence({"a", "b"}), nullptr, Ontology{}, labeled);
    DependencyGraph graph{0, {{0, 1, "L0"}}};
    auto gold_parts =
        gold_dependency_parts(full, graph, [](const std::string& l) { return l == "L0" ? 0 : l == "L1" ? 1 : -1; });
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    LossOptions options;
    options.decode.deterministic_labels = {0};
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> values(full.size());
      for (double& v : values) v = normal(rng);
      autodiff::Graph<double> g;
      auto scores = inputs_of(g, values);
      auto loss = sdp_hinge_loss<double>(g, scores, full, gold_parts, options);
      CHECK(loss.value == doctest::Approx(enumerated_sdp_hinge(full, values, gold_parts, {})).epsilon(1e-9));
    }
  }
  SUBCASE("a constant added to every top-arc score leaves the loss unchanged") {
    SpaceLimits with_top;
    with_top.num_labels = 1;
    auto full = build_candidate_space(sentence({"a", "b", "c"}), nullptr, Ontology{}, with_top);
    DependencyGraph graph{1, {{1, 0, "L"}, {1, 2, "L"}}};
    auto gold_parts = gold_dependency_parts(full, graph, [](const std::string&) { return 0; });
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    std::vector<double> values(full.size());
    for (double& v : values) v = normal(rng);
    autodiff::Graph<double> g1;
    auto s1 = inputs_of(g1, values);
    double base = sdp_hinge_loss<double>(g1, s1, full, gold_parts).value;
    for (int p : full.arcs_from(kRoot)) values[p] += 3.7;
    autodiff::Graph<double> g2;
    auto s2 = inputs_of(g2, values);
    CHECK(sdp_hinge_loss<double>(g2, s2, full, gold_parts).value == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("l1 penalty on cross-task scores") {
  Ontology o;
  o.add_frame("F", {"A"});
  o.add_lu("w.v", {"F"});
  Target t{0, 0, "w.v"};
  SpaceLimits limits;
  limits.top_arcs = false;
  limits.heads = false;
  auto space = build_candidate_space(sentence({"w", "x"}), &t, o, limits);
  auto cross = space.of_kind(PartKind::CrossTask);
  REQUIRE(cross.size() == 2);  // spans (0,1) and (1,1) contain token 1
  std::vector<double> values(space.size(), 1.0);
  values[cross[0]] = 0.5;
  values[cross[1]] = -0.25;
  autodiff::Graph<double> g;
  auto scores = inputs_of(g, values);
  CHECK(l1_penalty<double>(g, scores, space, 0.01).scalar() == doctest::Approx(0.0075).epsilon(1e-15));
  CHECK(l1_penalty<double>(g, scores, space, 0.0).scalar() == 0.0);
  limits.dependencies = false;
  auto bare = build_candidate_space(sentence({"w", "x"}), &t, o, limits);
  autodiff::Graph<double> h;
  auto bare_scores = inputs_of(h, std::vector<double>(bare.size(), 1.0));
  CHECK(l1_penalty<double>(h, bare_scores, bare, 0.01).scalar() == 0.0);
}

TEST_CASE("hinge gradients through the model pass finite differences") {
  auto vocab = jointsem::testing::toy_vocab({"he", "went", "home"}, {"L"});
  Ontology ontology = jointsem::testing::toy_ontology();
  std::mt19937_64 rng(23);
  auto config = jointsem::testing::tiny_config();
  config.max_span_length = 2;
  Model<double> model(config, ontology, vocab, rng);
  auto s = sentence({"he", "went", "home"});
  Target t{1, 1, "go.v"};
  auto space = model.candidates(s, &t);
  FrameParse parse{t, "Motion", {{2, 2, "Goal"}}};
  auto gold = gold_frame_parts(space, parse, ontology);

  auto latent = [&](autodiff::Graph<double>& g) {
    auto enc = model.encode(g, s);
    auto scores = model.score(g, enc, space);
    return latent_hinge_loss<double>(g, scores, space, gold).node + l1_penalty<double>(g, scores, space, 0.01);
  };
  auto report = autodiff::grad_check<double>(model.store(), latent, autodiff::all_parameters(model.store()), 1e-4);
  CHECK(report.passed);

  auto dep_space = model.candidates(s, nullptr);
  DependencyGraph graph{1, {{1, 0, "L"}, {1, 2, "L"}}};
  auto dep_gold = gold_dependency_parts(dep_space, graph, [](const std::string&) { return 0; });
  auto sdp = [&](autodiff::Graph<double>& g) {
    auto enc = model.encode(g, s);
    auto scores = model.score(g, enc, dep_space);
    return sdp_hinge_loss<double>(g, scores, dep_space, dep_gold).node;
  };
  report = autodiff::grad_check<double>(model.store(), sdp, autodiff::all_parameters(model.store()), 1e-4);
  CHECK(report.passed);
}

TEST_CASE("vocabularies and deterministic labels") {
  Corpora c;
  c.dm_train.push_back(jointsem::testing::with_graph(sentence({"a", "b", "c"}),
                                                     DependencyGraph{0, {{0, 1, "X"}, {0, 2, "X"}, {1, 2, "Y"}}}));
  c.fn_train.push_back(sentence({"a", "d"}));
  EmbeddingTable table;
  table.dimension = 2;
  table.vectors["zebra"] = Eigen::VectorXd::Ones(2);
  auto v = build_vocabularies(c, &table);
  CHECK(v.tokens.words.count(v.tokens.words.id("a")) == 2);
  CHECK(v.tokens.words.contains("zebra"));
  CHECK(v.tokens.words.count(v.tokens.words.id("zebra")) == 0);
  CHECK(v.labels.names == std::vector<std::string>{"X", "Y"});
  CHECK(v.deterministic_labels == std::vector<int>{1});
}

TEST_CASE("training") {
  SyntheticConfig data_config;
  data_config.fn_train = 12;
  data_config.dm_train = 12;
  data_config.fn_dev = 6;
  data_config.dm_dev = 6;
  auto data = generate_synthetic(data_config);
  Corpora corpora{data.fn_train, {}, data.fn_dev, data.dm_train, data.dm_dev};
  auto vocab = std::make_shared<ModelVocabularies>(build_vocabularies(corpora));
  auto model_config = jointsem::testing::tiny_config();
  model_config.encoder = EncoderConfig{8, 4, 4, 8, 1, 8};
  model_config.embedding = 8;
  model_config.rank = 8;
  TrainConfig config;
  config.epochs = 5;
  config.threads = 1;

  SUBCASE("loss decreases over five epochs on a tiny corpus") {
    std::mt19937_64 rng(1);
    Model<double> model(model_config, data.ontology, vocab, rng);
    auto result = train(model, corpora, config);
    REQUIRE(result.log.size() == 5);
    for (int e = 1; e < 5; ++e) CHECK(result.log[e].mean_loss < result.log[e - 1].mean_loss);
    CHECK(result.best_epoch >= 0);
    CHECK(result.log[result.best_epoch].dev_fn_f1 == result.best_dev_fn_f1);
    for (const auto& r : result.log) {
      CHECK(r.dev_sdp_f1 >= 0.0);
      CHECK(r.dev_sdp_f1 <= 1.0);
    }
  }
  SUBCASE("the Basic configuration ignores dependency data") {
    model_config.joint = false;
    model_config.cross_task = false;
    config.epochs = 2;
    std::mt19937_64 r1(4), r2(4);
    Model<double> a(model_config, data.ontology, vocab, r1);
    Model<double> b(model_config, data.ontology, vocab, r2);
    train(a, corpora, config);
    Corpora fn_only = corpora;
    fn_only.dm_train.clear();
    fn_only.dm_dev.clear();
    train(b, fn_only, config);
    auto pa = a.store().begin(), pb = b.store().begin();
    for (; pa != a.store().end(); ++pa, ++pb) CHECK(pa->value == pb->value);
  }
  SUBCASE("empty corpora are rejected") {
    std::mt19937_64 rng(1);
    Model<double> model(model_config, data.ontology, vocab, rng);
    CHECK_THROWS_AS(train(model, Corpora{}, config), ValidationError);
  }
  SUBCASE("parallel prediction matches sequential prediction") {
    std::mt19937_64 rng(2);
    Model<double> model(model_config, data.ontology, vocab, rng);
    Predictor one(model), many(model);
    many.threads = 3;
    auto a = one.corpus(data.fn_dev), b = many.corpus(data.fn_dev);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto& pa = a[k].frames()->parses;
      const auto& pb = b[k].frames()->parses;
      REQUIRE(pa.size() == pb.size());
      for (std::size_t j = 0; j < pa.size(); ++j) {
        CHECK(pa[j].frame == pb[j].frame);
        CHECK(pa[j].arguments == pb[j].arguments);
      }
    }
  }
}
