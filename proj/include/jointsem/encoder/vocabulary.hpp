#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace jointsem {

/// String interning with an UNK entry at id 0 and per-entry training counts.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();

  /// Adds the string if new and increments its count by `count`.
  int add(const std::string& token, long count = 1);
  /// Id of the string, or kUnk.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(id); }
  long count(int id) const { return counts_.at(id); }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<long>& counts() const { return counts_; }

  /// Rebuilds from stored tokens and counts; tokens[0] must be the UNK token.
  static Vocabulary from(std::vector<std::string> tokens, std::vector<long> counts);

 private:
  std::vector<std::string> tokens_;
  std::vector<long> counts_;
  std::map<std::string, int, std::less<>> ids_;
};

}  // namespace jointsem
