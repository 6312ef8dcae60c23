#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jointsem {

/// Pretrained word vectors: one token per line followed by its components.
struct EmbeddingTable {
  int dimension = 0;
  std::map<std::string, Eigen::VectorXd> vectors;
};

/// The dimension comes from the first line; a later line of another width is
/// a ParseError at that line. Duplicate tokens: the last occurrence wins.
EmbeddingTable read_embeddings(std::istream& in, const std::string& source = "<stream>");
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace jointsem
