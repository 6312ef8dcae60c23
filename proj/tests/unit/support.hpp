#pragma once

#include <string>
#include <vector>

#include "jointsem/core/ontology.hpp"
#include "jointsem/core/sentence.hpp"

namespace jointsem::testing {

inline const std::string kFixtures = JOINTSEM_FIXTURES;

inline Sentence sentence(const std::vector<std::string>& words, const std::string& id = "s") {
  Sentence s;
  s.id = id;
  for (const auto& w : words) s.tokens.push_back({w, w, "NN"});
  return s;
}

inline Sentence with_frames(Sentence s, std::vector<FrameParse> parses) {
  s.supervision = FrameAnnotations{std::move(parses)};
  return s;
}

inline Sentence with_graph(Sentence s, DependencyGraph g) {
  s.supervision = std::move(g);
  return s;
}

/// LU "go.v" evokes Motion (Theme, Goal) and Travel (Traveler, Goal, Means);
/// LU "eat.v" evokes Ingestion (Ingestor, Food) only.
inline Ontology toy_ontology() {
  Ontology o;
  o.add_frame("Motion", {"Theme", "Goal"});
  o.add_frame("Travel", {"Traveler", "Goal", "Means"});
  o.add_frame("Ingestion", {"Ingestor", "Food"});
  o.add_lu("go.v", {"Motion", "Travel"});
  o.add_lu("eat.v", {"Ingestion"});
  return o;
}

}  // namespace jointsem::testing
