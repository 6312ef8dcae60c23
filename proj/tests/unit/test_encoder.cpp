#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "jointsem/autodiff/grad_check.hpp"
#include "jointsem/encoder/encoder.hpp"
#include "support.hpp"

using namespace jointsem;
using jointsem::testing::sentence;
using M = autodiff::Matrix<double>;
using E = autodiff::Expr<double>;

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

M tanh_of(const M& m) { return m.array().tanh().matrix(); }

}  // namespace

TEST_CASE("word dropout probability α/(1+count)") {
  CHECK(word_dropout_probability(1.0, 0) == 1.0);
  CHECK(word_dropout_probability(0.0, 7) == 0.0);
  CHECK(word_dropout_probability(1.0, 1) == 0.5);
  CHECK(word_dropout_probability(0.25, 3) == 0.0625);
}

TEST_CASE("words with zero training count are always dropped at α=1 and never at α=0") {
  auto v = vocab_of({"a"});
  v->words.add("zero", 0);
  autodiff::ParameterStore<double> store;
  std::mt19937_64 rng(1);
  Encoder<double> enc(store, "e", EncoderConfig{4, 2, 2, 3, 1, 3}, v, rng);
  const M& table = store[enc.word_table()].value;
  auto s = sentence({"zero"});
  std::mt19937_64 coin(9);
  for (int k = 0; k < 20; ++k) {
    autodiff::Graph<double> g(&store);
    auto x = enc.embed(g, s, 1.0, &coin);
    CHECK(g.value(x[0]).topRows(4) == table.col(Vocabulary::kUnk));
    auto kept = enc.embed(g, s, 0.0, &coin);
    CHECK(g.value(kept[0]).topRows(4) == table.col(v->words.id("zero")));
  }
}

TEST_CASE("unknown words map to UNK and embeddings concatenate word, lemma, POS") {
  auto v = vocab_of({"cat", "sat"});
  autodiff::ParameterStore<double> store;
  std::mt19937_64 rng(2);
  Encoder<double> enc(store, "e", EncoderConfig{4, 3, 2, 3, 1, 3}, v, rng);
  autodiff::Graph<double> g(&store);
  auto x = enc.embed(g, sentence({"cat", "dog"}), 0.0, nullptr);
  REQUIRE(x.size() == 2);
  CHECK(g.value(x[0]).rows() == 9);
  CHECK(g.value(x[1]).topRows(4) == store[enc.word_table()].value.col(Vocabulary::kUnk));
  CHECK(g.value(x[0]).topRows(4) == store[enc.word_table()].value.col(v->words.id("cat")));
}

TEST_CASE("all-zero LSTM weights give position-independent token vectors") {
  auto v = vocab_of({"a", "b", "c"});
  autodiff::ParameterStore<double> store;
  std::mt19937_64 rng(3);
  Encoder<double> enc(store, "e", EncoderConfig{4, 2, 2, 3, 2, 3}, v, rng);
  for (auto& p : store) {
    if (p.name.find("/lstm/") != std::string::npos) p.value.setZero();
  }
  autodiff::Graph<double> g(&store);
  auto h = enc.encode(g, sentence({"a", "b", "c", "a"}));
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(g.value(h[i]) == g.value(h[0]));
  CHECK(g.value(h[0]).rows() == 6);
}

TEST_CASE("reversing the sentence swaps forward and backward halves with shared weights") {
  auto v = vocab_of({"a", "b", "c", "d"});
  autodiff::ParameterStore<double> store;
  std::mt19937_64 rng(4);
  Encoder<double> enc(store, "e", EncoderConfig{4, 2, 2, 3, 1, 3}, v, rng);
  store.set_value(store.id("e/lstm/0/bw/W"), store[store.id("e/lstm/0/fw/W")].value);
  store.set_value(store.id("e/lstm/0/bw/b"), store[store.id("e/lstm/0/fw/b")].value);
  autodiff::Graph<double> g(&store);
  auto forward = enc.encode(g, sentence({"a", "b", "c", "d"}));
  auto reversed = enc.encode(g, sentence({"d", "c", "b", "a"}));
  const int n = 4;
  for (int i = 0; i < n; ++i) {
    const M& x = g.value(forward[i]);
    const M& y = g.value(reversed[n - 1 - i]);
    CHECK((x.topRows(3) - y.bottomRows(3)).norm() < 1e-15);
    CHECK((x.bottomRows(3) - y.topRows(3)).norm() < 1e-15);
  }
}

TEST_CASE("one-token sentence: h = [fw; bw] from single steps") {
  auto v = vocab_of({"a"});
  autodiff::ParameterStore<double> store;
  std::mt19937_64 rng(5);
  Encoder<double> enc(store, "e", EncoderConfig{4, 2, 2, 3, 1, 3}, v, rng);
  autodiff::Graph<double> g(&store);
  auto s = sentence({"a"});
  auto x = enc.embed(g, s, 0.0, nullptr);
  auto h = enc.contextualize(g, x);
  const M& in = g.value(x[0]);
  auto step = [&](const std::string& dir) {
    const M& W = store[store.id("e/lstm/0/" + dir + "/W")].value;
    const M& b = store[store.id("e/lstm/0/" + dir + "/b")].value;
    M z = W.leftCols(8) * in + b;  // h_prev = 0
    auto sig = [](const M& m) { return M((1.0 + (-m.array()).exp()).inverse()); };
    M c = (sig(z.middleRows(0, 3)).array() * z.middleRows(9, 3).array().tanh()).matrix();
    return M((sig(z.middleRows(6, 3)).array() * c.array().tanh()).matrix());
  };
  M expected(6, 1);
  expected << step("fw"), step("bw");
  CHECK((g.value(h[0]) - expected).norm() < 1e-14);
}

TEST_CASE("discrete span features") {
  auto f = discrete_features(2, 4, 1);
  CHECK(f[0] == 2.0);
  CHECK(f[1] == 1.0);
  CHECK(f[2] == 2.0);
  f = discrete_features(3, 3, 3);
  CHECK(f == std::array<double, 3>{1.0, 0.0, 0.0});
  f = discrete_features(0, 19, 0);
  CHECK(f[0] == std::log2(21.0));
  CHECK(f[1] == 0.0);
  CHECK(f[2] == std::log2(20.0));
}

TEST_CASE("span and target representations") {
  auto v = vocab_of({"a", "b", "c"});
  autodiff::ParameterStore<double> store;
  std::mt19937_64 rng(6);
  Encoder<double> enc(store, "e", EncoderConfig{4, 2, 2, 3, 1, 5}, v, rng);
  SpanMlps<double> mlps(store, "e", enc.width(), 5, rng);
  auto s = sentence({"a", "b", "c"});

  SUBCASE("a one-token span feeds h_i to both the start and end blocks") {
    autodiff::Graph<double> g(&store);
    auto h = enc.encode(g, s);
    SpanContext<double> ctx(g, mlps, h);
    const M& hi = g.value(h[1]);
    auto phi = discrete_features(1, 1, 0);
    M features(3, 1);
    features << phi[0], phi[1], phi[2];
    auto param = [&](const std::string& n) { return store[store.id("e/span/" + n)].value; };
    M hidden = tanh_of(param("W1_0") * hi + param("W1_1") * hi + param("W1_2") * features + param("b1"));
    M expected = tanh_of(param("W2") * hidden + param("b2"));
    CHECK((g.value(ctx.span(1, 1, 0)) - expected).norm() < 1e-14);
  }
  SUBCASE("identical inputs give identical outputs") {
    autodiff::Graph<double> g1(&store), g2(&store);
    SpanContext<double> c1(g1, mlps, enc.encode(g1, s));
    SpanContext<double> c2(g2, mlps, enc.encode(g2, s));
    CHECK(g1.value(c1.span(0, 2, 1)) == g2.value(c2.span(0, 2, 1)));
    CHECK(g1.value(c1.target({1, 2, "x"})) == g2.value(c2.target({1, 2, "x"})));
  }
  SUBCASE("the target length feature of a single token is 1") {
    autodiff::Graph<double> g(&store);
    auto h = enc.encode(g, s);
    SpanContext<double> ctx(g, mlps, h);
    auto param = [&](const std::string& n) { return store[store.id("e/target/" + n)].value; };
    M hidden = tanh_of(param("W1_0") * g.value(h[2]) + param("W1_1") * g.value(h[2]) + param("W1_2") * M::Ones(1, 1) +
                       param("b1"));
    M expected = tanh_of(param("W2") * hidden + param("b2"));
    CHECK((g.value(ctx.target({2, 2, "x"})) - expected).norm() < 1e-14);
  }
  SUBCASE("zero MLP weights and biases give zero vectors") {
    for (auto& p : store) {
      if (p.name.rfind("e/span/", 0) == 0 || p.name.rfind("e/target/", 0) == 0) p.value.setZero();
    }
    autodiff::Graph<double> g(&store);
    SpanContext<double> ctx(g, mlps, enc.encode(g, s));
    CHECK(g.value(ctx.span(0, 1, 2)).isZero());
    CHECK(g.value(ctx.target({0, 0, "x"})).isZero());
  }
  SUBCASE("span MLP weights do not influence the target representation") {
    autodiff::Graph<double> g1(&store);
    SpanContext<double> c1(g1, mlps, enc.encode(g1, s));
    M before = g1.value(c1.target({0, 1, "x"}));
    for (auto& p : store) {
      if (p.name.rfind("e/span/", 0) == 0) p.value.array() += 0.5;
    }
    autodiff::Graph<double> g2(&store);
    SpanContext<double> c2(g2, mlps, enc.encode(g2, s));
    CHECK(g2.value(c2.target({0, 1, "x"})) == before);
  }
}

TEST_CASE("encoder gradients pass finite differences") {
  auto v = vocab_of({"a", "b"});
  autodiff::ParameterStore<double> store;
  std::mt19937_64 rng(8);
  Encoder<double> enc(store, "e", EncoderConfig{3, 2, 2, 2, 2, 3}, v, rng);
  SpanMlps<double> mlps(store, "e", enc.width(), 3, rng);
  auto s = sentence({"a", "b", "a"});
  auto build = [&](autodiff::Graph<double>& g) {
    SpanContext<double> ctx(g, mlps, enc.encode(g, s));
    return sum_elements(ctx.span(0, 1, 2)) + sum_elements(ctx.target({2, 2, "x"}));
  };
  auto report = autodiff::grad_check<double>(store, build, autodiff::all_parameters(store), 1e-4);
  CHECK(report.passed);
}
