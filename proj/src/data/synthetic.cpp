#include "jointsem/data/synthetic.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>

namespace jointsem {

namespace {

enum NounClass { Person, Company, Artifact, Effect, Vehicle, Place, Object, kClasses };

const std::vector<std::vector<std::string>> kNouns = {
    {"man", "woman", "child", "doctor", "farmer"},
    {"company", "team", "firm", "club"},
    {"car", "table", "chair", "radio"},
    {"noise", "mess", "trouble", "fuss"},
    {"bus", "train", "boat", "taxi"},
    {"park", "city", "house", "garden"},
    {"book", "box", "cup", "letter"},
};
const std::vector<std::string> kAdjectives = {"old", "big", "red", "small", "quiet"};
const std::vector<std::string> kDeterminers = {"the", "a"};
const std::vector<std::string> kPrepositions = {"in", "near"};

struct Sense {
  std::string frame;
  std::string agent_role;
  std::string object_role;  // empty: intransitive
  std::vector<NounClass> objects;
};

struct Verb {
  std::string lemma;
  std::vector<std::string> forms;
  std::vector<Sense> senses;
};

const std::vector<Verb>& verbs() {
  static const std::vector<Verb> v = {
      {"run", {"runs", "ran"},
       {{"Self_motion", "Self_mover", "", {}}, {"Leadership", "Leader", "Governed", {Company}}}},
      {"make", {"makes", "made"},
       {{"Manufacturing", "Manufacturer", "Product", {Artifact, Object}},
        {"Causation", "Cause", "Effect", {Effect}}}},
      {"take", {"takes", "took"},
       {{"Taking", "Agent", "Theme", {Object, Artifact}}, {"Ride", "Traveler", "Vehicle", {Vehicle}}}},
      {"break", {"breaks", "broke"},
       {{"Damaging", "Agent", "Patient", {Artifact, Object}}, {"Rest", "Agent", "", {}}}},
      {"see", {"sees", "saw"}, {{"Perception", "Perceiver", "Phenomenon", {Person, Artifact, Vehicle, Object}}}},
  };
  return v;
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  void fill_ontology(Ontology& ontology) const {
    for (const Verb& v : verbs()) {
      std::vector<std::string> frames;
      for (const Sense& s : v.senses) {
        std::vector<std::string> roles{s.agent_role, "Place"};
        if (!s.object_role.empty()) roles.push_back(s.object_role);
        ontology.add_frame(s.frame, roles);
        frames.push_back(s.frame);
      }
      ontology.add_lu(v.lemma + ".v", frames);
    }
  }

  /// One clause with both annotations; the caller keeps only one.
  std::pair<FrameParse, DependencyGraph> clause(Sentence& s) {
    const Verb& verb = pick(verbs());
    const Sense& sense = pick(verb.senses);
    FrameParse parse;
    DependencyGraph graph;

    auto [subj_start, subj_head] = noun_phrase(s, graph, Person);
    int subj_end = s.size() - 1;
    int v = s.size();
    s.tokens.push_back({pick(verb.forms), verb.lemma, "VB"});
    graph.top = v;
    graph.arcs.push_back({v, subj_head, "ARG1"});
    parse.target = Target{v, v, verb.lemma + ".v"};
    parse.frame = sense.frame;
    parse.arguments.push_back({subj_start, subj_end, sense.agent_role});

    if (!sense.object_role.empty()) {
      auto [obj_start, obj_head] = noun_phrase(s, graph, pick(sense.objects));
      graph.arcs.push_back({v, obj_head, "ARG2"});
      parse.arguments.push_back({obj_start, s.size() - 1, sense.object_role});
    }
    if (coin(0.4)) {
      int p = s.size();
      s.tokens.push_back({pick(kPrepositions), "", "IN"});
      s.tokens.back().lemma = s.tokens.back().form;
      auto [np_start, np_head] = noun_phrase(s, graph, Place);
      (void)np_start;
      graph.arcs.push_back({p, v, "ARG1"});
      graph.arcs.push_back({p, np_head, "ARG2"});
      parse.arguments.push_back({p, s.size() - 1, "Place"});
    }
    std::sort(parse.arguments.begin(), parse.arguments.end());
    std::sort(graph.arcs.begin(), graph.arcs.end());
    return {parse, graph};
  }

  Sentence sentence(const std::string& id, bool frames) {
    Sentence s;
    s.id = id;
    auto [parse, graph] = clause(s);
    if (frames) {
      s.supervision = FrameAnnotations{{parse}};
    } else {
      s.supervision = graph;
    }
    return s;
  }

 private:
  /// Appends [Det Adj? Noun]; returns (start, head noun index).
  std::pair<int, int> noun_phrase(Sentence& s, DependencyGraph& graph, NounClass cls) {
    int start = s.size();
    int det = start;
    s.tokens.push_back({pick(kDeterminers), "", "DT"});
    s.tokens.back().lemma = s.tokens.back().form;
    int adj = -1;
    if (coin(0.3)) {
      adj = s.size();
      s.tokens.push_back({pick(kAdjectives), "", "JJ"});
      s.tokens.back().lemma = s.tokens.back().form;
    }
    int noun = s.size();
    const std::string& n = pick(kNouns[cls]);
    s.tokens.push_back({n, n, "NN"});
    graph.arcs.push_back({det, noun, "BV"});
    if (adj >= 0) graph.arcs.push_back({adj, noun, "ARG1"});
    return {start, noun};
  }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng_)];
  }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::mt19937_64 rng_;
};

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticConfig& config) {
  SyntheticCorpus corpus;
  Generator gen(config.seed);
  gen.fill_ontology(corpus.ontology);
  auto fill = [&](std::vector<Sentence>& out, int count, const std::string& prefix, bool frames) {
    for (int k = 0; k < count; ++k) out.push_back(gen.sentence(prefix + std::to_string(k), frames));
  };
  fill(corpus.fn_train, config.fn_train, "fn-train-", true);
  fill(corpus.dm_train, config.dm_train, "dm-train-", false);
  fill(corpus.fn_dev, config.fn_dev, "fn-dev-", true);
  fill(corpus.dm_dev, config.dm_dev, "dm-dev-", false);
  return corpus;
}

}  // namespace jointsem
