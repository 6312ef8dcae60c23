#include "jointsem/io/embeddings.hpp"

#include <fstream>
#include <sstream>

#include "jointsem/core/error.hpp"

namespace jointsem {

EmbeddingTable read_embeddings(std::istream& in, const std::string& source) {
  EmbeddingTable table;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> values;
    std::string field;
    while (fields >> field) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ParseError(source, number, "'" + field + "' is not a number");
      }
    }
    if (values.empty()) throw ParseError(source, number, "token '" + token + "' has no vector");
    if (table.dimension == 0) table.dimension = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != table.dimension) {
      throw ParseError(source, number,
                       "expected " + std::to_string(table.dimension) + " components, found " +
                           std::to_string(values.size()));
    }
    table.vectors[token] = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embeddings file '" + path + "'");
  return read_embeddings(in, path);
}

}  // namespace jointsem
