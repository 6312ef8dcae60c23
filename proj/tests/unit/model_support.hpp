#pragma once

#include <memory>
#include <random>

#include "jointsem/model/model.hpp"
#include "support.hpp"

namespace jointsem::testing {

inline std::shared_ptr<ModelVocabularies> toy_vocab(const std::vector<std::string>& words,
                                                    const std::vector<std::string>& labels = {"ARG1", "ARG2"}) {
  auto v = std::make_shared<ModelVocabularies>();
  for (const auto& w : words) {
    v->tokens.words.add(w);
    v->tokens.lemmas.add(w);
    v->tokens.pos.add("NN");
  }
  for (const auto& l : labels) v->labels.add(l);
  return v;
}

inline ModelConfig tiny_config() {
  ModelConfig c;
  c.encoder = EncoderConfig{3, 2, 2, 3, 1, 4};
  c.embedding = 3;
  c.rank = 3;
  c.max_span_length = 3;
  c.word_dropout = 0.0;
  return c;
}

}  // namespace jointsem::testing
