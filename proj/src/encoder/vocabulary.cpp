#include "jointsem/encoder/vocabulary.hpp"

#include "jointsem/core/error.hpp"

namespace jointsem {

Vocabulary::Vocabulary() {
  tokens_.push_back(kUnkToken);
  counts_.push_back(0);
  ids_.emplace(kUnkToken, kUnk);
}

int Vocabulary::add(const std::string& token, long count) {
  auto [it, inserted] = ids_.emplace(token, size());
  if (inserted) {
    tokens_.push_back(token);
    counts_.push_back(0);
  }
  counts_[it->second] += count;
  return it->second;
}

int Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.find(token) != ids_.end(); }

Vocabulary Vocabulary::from(std::vector<std::string> tokens, std::vector<long> counts) {
  if (tokens.empty() || tokens[0] != kUnkToken || tokens.size() != counts.size()) {
    throw ValidationError("malformed vocabulary: expected '<unk>' first and one count per token");
  }
  Vocabulary v;
  v.counts_[0] = counts[0];
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) throw ValidationError("duplicate vocabulary entry '" + tokens[i] + "'");
    v.add(tokens[i], counts[i]);
  }
  return v;
}

}  // namespace jointsem
