#pragma once

// Hand-computed metric fixtures shared by the unit tests and the acceptance run.

#include <optional>
#include <string>
#include <vector>

#include "jointsem/eval/metrics.hpp"
#include "support.hpp"

namespace jointsem::testing {

/// Six-token sentence with one go.v target at token 1; no parse when `frame` is empty.
inline std::vector<Sentence> go_parse(const std::string& frame, std::vector<ArgumentSpan> arguments) {
  Sentence s = sentence({"a", "went", "b", "c", "d", "e"}, "m");
  if (frame.empty()) return {with_frames(s, {})};
  return {with_frames(s, {FrameParse{{1, 1, "go.v"}, frame, std::move(arguments)}})};
}

inline std::vector<Sentence> three_token_graph(DependencyGraph g) {
  return {with_graph(sentence({"a", "b", "c"}, "g"), std::move(g))};
}

struct FrameFixture {
  const char* name;
  std::vector<Sentence> gold, predicted;
  long correct, predicted_parts, gold_parts, frames_correct;
};

inline std::vector<FrameFixture> frame_fixtures() {
  const std::vector<ArgumentSpan> both{{0, 0, "Theme"}, {2, 3, "Goal"}};
  return {
      {"identical", go_parse("Motion", both), go_parse("Motion", both), 3, 3, 3, 1},
      {"wrong frame, one argument", go_parse("Motion", both), go_parse("Travel", {{0, 0, "Theme"}}), 1, 2, 3, 0},
      {"wrong span", go_parse("Motion", {{2, 3, "Goal"}}), go_parse("Motion", {{2, 2, "Goal"}}), 1, 2, 2, 1},
      {"extra argument", go_parse("Motion", {{0, 0, "Theme"}}),
       go_parse("Motion", {{0, 0, "Theme"}, {2, 2, "Goal"}}), 2, 3, 2, 1},
      {"target not predicted", go_parse("Motion", both), go_parse("", {}), 0, 0, 3, 0},
      {"roles swapped", go_parse("Motion", both), go_parse("Motion", {{0, 0, "Goal"}, {2, 3, "Theme"}}), 1, 3, 3, 1},
  };
}

struct SdpFixture {
  const char* name;
  std::vector<Sentence> gold, predicted;
  bool include_top;
  long correct, predicted_triples, gold_triples;
};

inline std::vector<SdpFixture> sdp_fixtures() {
  const DependencyGraph two{0, {{0, 1, "A"}, {1, 2, "B"}}};
  return {
      {"identical", three_token_graph(two), three_token_graph(two), true, 3, 3, 3},
      {"gold {A}, predicted {A, B}", three_token_graph({std::nullopt, {{0, 1, "A"}}}),
       three_token_graph({std::nullopt, {{0, 1, "A"}, {0, 2, "B"}}}), true, 1, 2, 1},
      {"label mismatch", three_token_graph({std::nullopt, {{0, 1, "A"}}}),
       three_token_graph({std::nullopt, {{0, 1, "B"}}}), true, 0, 1, 1},
      {"top differs", three_token_graph({0, {{0, 1, "A"}}}), three_token_graph({2, {{0, 1, "A"}}}), true, 1, 2, 2},
      {"top excluded", three_token_graph({0, {{0, 1, "A"}}}), three_token_graph({2, {{0, 1, "A"}}}), false, 1, 1, 1},
      {"reversed arc", three_token_graph({std::nullopt, {{0, 1, "A"}}}),
       three_token_graph({std::nullopt, {{1, 0, "A"}}}), true, 0, 1, 1},
      {"empty", three_token_graph({std::nullopt, {}}), three_token_graph({std::nullopt, {}}), true, 0, 0, 0},
  };
}

struct BreakdownFixture {
  const char* name;
  std::vector<Sentence> gold, predicted;
  ErrorBreakdown expected;
};

inline bool operator==(const ErrorBreakdown& a, const ErrorBreakdown& b) {
  return a.frame == b.frame && a.role == b.role && a.role_correct_frame == b.role_correct_frame &&
         a.span == b.span && a.argument == b.argument && a.missing == b.missing;
}

inline std::vector<BreakdownFixture> breakdown_fixtures() {
  return {
      {"frame", go_parse("Motion", {{0, 0, "Theme"}}), go_parse("Travel", {{0, 0, "Theme"}}), {1, 0, 0, 0, 0, 0}},
      {"role, frame correct", go_parse("Motion", {{2, 3, "Goal"}}), go_parse("Motion", {{2, 3, "Theme"}}),
       {0, 1, 1, 0, 0, 0}},
      {"span", go_parse("Motion", {{2, 3, "Goal"}}), go_parse("Motion", {{3, 4, "Goal"}}), {0, 0, 0, 1, 0, 0}},
      {"argument", go_parse("Motion", {{0, 0, "Theme"}}), go_parse("Motion", {{0, 0, "Theme"}, {4, 5, "Goal"}}),
       {0, 0, 0, 0, 1, 0}},
      {"missing", go_parse("Motion", {{0, 0, "Theme"}, {4, 5, "Goal"}}), go_parse("Motion", {}),
       {0, 0, 0, 0, 0, 2}},
      {"mixed", go_parse("Motion", {{0, 0, "Theme"}, {2, 3, "Goal"}}),
       go_parse("Travel", {{0, 0, "Goal"}, {5, 5, "Means"}}), {1, 1, 0, 0, 1, 1}},
  };
}

struct BinExpectation {
  int bin;
  long gold, predicted, gold_matched, predicted_matched;
};

struct BinFixture {
  const char* name;
  std::vector<Sentence> gold, predicted;
  std::vector<BinExpectation> expected;
};

inline std::vector<BinFixture> bin_fixtures() {
  return {
      {"lengths 3 and 4 share bin 2", go_parse("Motion", {{0, 0, "Theme"}, {2, 5, "Goal"}}),
       go_parse("Motion", {{0, 0, "Theme"}, {2, 4, "Goal"}}), {{0, 1, 1, 1, 1}, {2, 1, 1, 0, 0}}},
      {"prediction only", go_parse("Motion", {}), go_parse("Motion", {{2, 3, "Goal"}}), {{1, 0, 1, 0, 0}}},
      {"no arguments", go_parse("Motion", {}), go_parse("Motion", {}), {}},
      {"one matched token", go_parse("Motion", {{0, 0, "Theme"}}), go_parse("Motion", {{0, 0, "Theme"}}),
       {{0, 1, 1, 1, 1}}},
      {"length 5 is bin 3", go_parse("Motion", {{0, 4, "Goal"}}), go_parse("Motion", {{0, 4, "Goal"}, {5, 5, "Theme"}}),
       {{0, 0, 1, 0, 0}, {3, 1, 1, 1, 1}}},
      {"length 1 in bin 0, length 4 in bin 2", go_parse("Motion", {{0, 0, "Theme"}}),
       go_parse("Motion", {{2, 5, "Goal"}}), {{0, 1, 0, 0, 0}, {2, 0, 1, 0, 0}}},
  };
}

/// Names of the fixtures whose metrics differ from the expectation.
inline std::vector<std::string> failing_metric_fixtures(const Ontology& ontology) {
  std::vector<std::string> failed;
  for (const auto& f : frame_fixtures()) {
    auto r = eval_frames(f.gold, f.predicted, ontology);
    if (r.parts.correct != f.correct || r.parts.predicted != f.predicted_parts || r.parts.gold != f.gold_parts ||
        r.frames_correct != f.frames_correct) {
      failed.push_back(std::string("frames: ") + f.name);
    }
  }
  for (const auto& f : sdp_fixtures()) {
    auto r = eval_sdp(f.gold, f.predicted, f.include_top);
    if (r.correct != f.correct || r.predicted != f.predicted_triples || r.gold != f.gold_triples) {
      failed.push_back(std::string("sdp: ") + f.name);
    }
  }
  for (const auto& f : breakdown_fixtures()) {
    if (!(error_breakdown(f.gold, f.predicted) == f.expected)) failed.push_back(std::string("breakdown: ") + f.name);
  }
  for (const auto& f : bin_fixtures()) {
    auto bins = length_binned_pr(f.gold, f.predicted);
    bool same = bins.size() == f.expected.size();
    for (std::size_t k = 0; same && k < bins.size(); ++k) {
      const auto& e = f.expected[k];
      same = bins[k].bin == e.bin && bins[k].gold == e.gold && bins[k].predicted == e.predicted &&
             bins[k].gold_matched == e.gold_matched && bins[k].predicted_matched == e.predicted_matched;
    }
    if (!same) failed.push_back(std::string("bins: ") + f.name);
  }
  return failed;
}

}  // namespace jointsem::testing
