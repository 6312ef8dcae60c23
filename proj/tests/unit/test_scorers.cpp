#include <doctest.h>

#include <random>

#include "jointsem/autodiff/grad_check.hpp"
#include "jointsem/inference/decode.hpp"
#include "jointsem/model/model.hpp"
#include "jointsem/scorers/multilinear.hpp"
#include "model_support.hpp"

using namespace jointsem;
using jointsem::testing::sentence;
using M = Eigen::MatrixXd;
using V = Eigen::VectorXd;

namespace {

/// Rank-1 factor row e_0ᵀ scaled by `dot`, with input e_0: the slot's dot product is `dot`.
struct Slot {
  M factor;
  V input;
};
Slot slot(double dot) {
  Slot s{M::Zero(1, 2), V::Zero(2)};
  s.factor(0, 0) = dot;
  s.input(0) = 1.0;
  return s;
}

M tanh_of(const M& m) { return m.array().tanh().matrix(); }

}  // namespace

TEST_CASE("multilinear product of per-slot dots") {
  auto a = slot(2), b = slot(3), c = slot(4);
  CHECK(multilinear_score(a.factor, a.input, b.factor, b.input, c.factor, c.input) == 24.0);

  auto z = slot(3);
  z.input.setZero();
  CHECK(multilinear_score(a.factor, a.input, z.factor, z.input, c.factor, c.input) == 0.0);

  // r = 2 with per-rank products 5·1 and (−3)·1.
  M f1(2, 1), f2(2, 1);
  f1 << 5, -3;
  f2 << 1, 1;
  V one = V::Ones(1);
  CHECK(multilinear_score(f1, one, f2, one) == 2.0);
}

TEST_CASE("tensor contraction oracle: Σ_k Π_s (F_s x_s)_k equals explicit CP-tensor contraction") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  const int r = 3;
  auto rand = [&](int rows, int cols) {
    M m(rows, cols);
    for (auto& v : m.reshaped()) v = normal(rng);
    return m;
  };
  M F1 = rand(r, 2), F2 = rand(r, 3), F3 = rand(r, 2);
  V x1 = rand(2, 1), x2 = rand(3, 1), x3 = rand(2, 1);
  // T[a,b,c] = Σ_k F1[k,a] F2[k,b] F3[k,c]; s = Σ_abc T[a,b,c] x1[a] x2[b] x3[c].
  double expected = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 2; ++c) {
        double t = 0.0;
        for (int k = 0; k < r; ++k) t += F1(k, a) * F2(k, b) * F3(k, c);
        expected += t * x1(a) * x2(b) * x3(c);
      }
  CHECK(multilinear_score(F1, x1, F2, x2, F3, x3) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("argument and cross-task scorers") {
  RankFactors<double> f;
  auto one = slot(1);
  auto set_all = [&](double span, double role, double arc_w, double arc) {
    f.frame = f.target = f.lu = one.factor;
    f.span = slot(span).factor;
    f.role = slot(role).factor;
    f.arc_weight = slot(arc_w).factor;
    f.arc = slot(arc).factor;
  };
  V e = one.input;
  V zero = V::Zero(2);

  set_all(2, 3, 1, 1);
  CHECK(score_argument(f, e, e, e, e, e) == 6.0);
  CHECK(score_argument(f, e, e, e, e, zero) == 0.0);
  V scaled = 2.5 * e;
  CHECK(score_argument(f, e, e, e, scaled, e) == 2.5 * score_argument(f, e, e, e, e, e));

  set_all(1, 1, 1, 1);
  CHECK(score_cross_task(f, e, e, e, e, e, e, e) == 1.0);
  CHECK(score_cross_task(f, e, e, e, e, e, e, zero) == 0.0);
  double base = score_cross_task(f, e, e, e, e, e, e, e);
  f.arc *= 2.0;
  CHECK(score_cross_task(f, e, e, e, e, e, e, e) == 2.0 * base);
  CHECK(score_predicate(f, e, e, e) == 1.0);
}

TEST_CASE("model part scores") {
  auto vocab = jointsem::testing::toy_vocab({"he", "went", "home", "fast"});
  Ontology ontology = jointsem::testing::toy_ontology();
  std::mt19937_64 rng(17);
  Model<double> model(jointsem::testing::tiny_config(), ontology, vocab, rng);
  auto& store = model.store();
  auto s = sentence({"he", "went", "home", "fast"});
  Target t{1, 1, "go.v"};
  auto space = model.candidates(s, &t);
  REQUIRE(!space.of_kind(PartKind::CrossTask).empty());
  auto param = [&](const std::string& name) -> const M& { return store[store.id("model/" + name)].value; };

  SUBCASE("each part score equals its scorer evaluated directly") {
    autodiff::Graph<double> g(&store);
    auto enc = model.encode(g, s);
    auto nodes = model.score(g, enc, space);
    auto h = [&](int i) -> M { return i == kRoot ? param("root") : g.value(enc.tokens[i]); };
    auto mlp = [&](const std::string& name, std::vector<M> inputs) {
      M pre = param(name + "/b1");
      for (std::size_t k = 0; k < inputs.size(); ++k) pre += param(name + "/W1_" + std::to_string(k)) * inputs[k];
      return M(tanh_of(param(name + "/W2") * tanh_of(pre) + param(name + "/b2")));
    };
    RankFactors<double> f = model.rank_factors();
    V g_tgt = g.value(enc.spans.target(t));
    V g_lu = param("emb/lu").col(space.lu());
    for (int p = 0; p < space.size(); ++p) {
      double expected = std::visit(
          [&](const auto& part) -> double {
            using T = std::decay_t<decltype(part)>;
            if constexpr (std::is_same_v<T, PredicatePart>) {
              V g_fr = param("emb/frame").col(part.frame);
              return score_predicate(f, g_fr, g_tgt, g_lu);
            } else if constexpr (std::is_same_v<T, ArgumentPart>) {
              V g_fr = param("emb/frame").col(part.frame);
              V g_span = g.value(enc.spans.span(part.start, part.end, t.start));
              V g_role = param("emb/role").col(part.role);
              return score_argument(f, g_fr, g_tgt, g_lu, g_span, g_role);
            } else if constexpr (std::is_same_v<T, HeadPart>) {
              return (param("head/w").transpose() * mlp("head", {h(part.token)}))(0, 0);
            } else if constexpr (std::is_same_v<T, UnlabeledArcPart>) {
              return (param("arc/w").transpose() * mlp("arc", {h(part.head), h(part.dependent)}))(0, 0);
            } else if constexpr (std::is_same_v<T, LabeledArcPart>) {
              M label = param("emb/label").col(part.label);
              return (param("label/w").transpose() * mlp("label", {h(part.head), h(part.dependent), label}))(0, 0);
            } else {
              const auto& a = std::get<ArgumentPart>(space.part(part.argument));
              const auto& u = std::get<UnlabeledArcPart>(space.part(part.arc));
              V g_fr = param("emb/frame").col(a.frame);
              V g_span = g.value(enc.spans.span(a.start, a.end, t.start));
              V g_role = param("emb/role").col(a.role);
              V w_arc = param("arc/w");
              V g_arc = mlp("arc", {h(u.head), h(u.dependent)});
              return score_cross_task(f, g_fr, g_tgt, g_lu, g_span, g_role, w_arc, g_arc);
            }
          },
          space.part(p));
      CHECK(nodes[p].scalar() == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("S(y, z) is the sum of contained part scores") {
    auto scores = model.score_values(s, space);
    std::vector<int> parts{space.predicate_index(0), space.argument_index(0, 2, 2, ontology.role_id("Goal")),
                           space.arc_index(1, 2)};
    parts = close_over_cross_task(space, parts);
    REQUIRE(parts.size() == 4);
    double expected = 0.0;
    for (int p : parts) expected += scores[p];
    CHECK(total_score(scores, parts) == expected);
  }

  SUBCASE("zero output weights zero every score") {
    for (auto& p : store) {
      if (p.name.find("/rank/") != std::string::npos || p.name.ends_with("/w")) p.value.setZero();
    }
    for (double v : model.score_values(s, space)) CHECK(v == 0.0);
  }

  SUBCASE("ordered arcs and label embeddings") {
    auto scores = model.score_values(s, space);
    CHECK(scores[space.arc_index(0, 2)] != scores[space.arc_index(2, 0)]);
    CHECK(scores[space.labeled_arc_index(0, 2, 0)] != scores[space.labeled_arc_index(0, 2, 1)]);
    int table = store.id("model/emb/label");
    store[table].value.col(1) = store[table].value.col(0);
    auto tied = model.score_values(s, space);
    CHECK(tied[space.labeled_arc_index(0, 2, 0)] == tied[space.labeled_arc_index(0, 2, 1)]);
  }

  SUBCASE("scorer gradients pass finite differences at 1e-4") {
    auto kinds = {PartKind::Predicate, PartKind::Argument, PartKind::Head, PartKind::UnlabeledArc,
                  PartKind::LabeledArc, PartKind::CrossTask};
    for (PartKind kind : kinds) {
      int p = space.of_kind(kind)[space.of_kind(kind).size() / 2];
      auto build = [&](autodiff::Graph<double>& g) {
        auto enc = model.encode(g, s);
        return model.score(g, enc, space)[p];
      };
      auto report = autodiff::grad_check<double>(store, build, autodiff::all_parameters(store), 1e-4);
      CHECK_MESSAGE(report.passed, "part kind ", static_cast<int>(kind), " worst ", report.worst);
    }
  }
}

TEST_CASE("Basic and NoCTP configurations shape the candidate space") {
  auto vocab = jointsem::testing::toy_vocab({"he", "went", "home"});
  Ontology ontology = jointsem::testing::toy_ontology();
  auto s = sentence({"he", "went", "home"});
  Target t{1, 1, "go.v"};
  std::mt19937_64 rng(1);
  auto config = jointsem::testing::tiny_config();

  config.joint = false;
  Model<double> basic(config, ontology, vocab, rng);
  auto space = basic.candidates(s, &t);
  CHECK(space.of_kind(PartKind::UnlabeledArc).empty());
  CHECK(space.of_kind(PartKind::CrossTask).empty());

  config.joint = true;
  config.cross_task = false;
  Model<double> no_ctp(config, ontology, vocab, rng);
  CHECK(no_ctp.candidates(s, &t).of_kind(PartKind::UnlabeledArc).empty());
  CHECK_FALSE(no_ctp.candidates(s, nullptr).of_kind(PartKind::UnlabeledArc).empty());
}

TEST_CASE("ensemble scores are the member mean") {
  auto vocab = jointsem::testing::toy_vocab({"he", "went", "home"});
  Ontology ontology = jointsem::testing::toy_ontology();
  std::mt19937_64 rng(3);
  Model<double> a(jointsem::testing::tiny_config(), ontology, vocab, rng);
  Model<double> b(jointsem::testing::tiny_config(), ontology, vocab, rng);
  auto s = sentence({"he", "went", "home"});
  Target t{1, 1, "go.v"};
  auto space = a.candidates(s, &t);
  auto sa = a.score_values(s, space), sb = b.score_values(s, space);
  auto mean = ensemble_scores<double>({&a, &b}, s, space);
  for (int p = 0; p < space.size(); ++p) CHECK(mean[p] == (sa[p] + sb[p]) / 2.0);
  CHECK(ensemble_scores<double>({&a, &a}, s, space) == sa);

  Ontology other = ontology;
  other.add_frame("Extra", {"X"});
  Model<double> c(jointsem::testing::tiny_config(), other, vocab, rng);
  CHECK_THROWS(ensemble_scores<double>({&a, &c}, s, space));
  CHECK_THROWS(ensemble_scores<double>({}, s, space));
}
