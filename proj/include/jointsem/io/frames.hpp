#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "jointsem/core/ontology.hpp"
#include "jointsem/core/sentence.hpp"

namespace jointsem {

/// One JSON object per line:
///   {"id", "tokens", "lemmas", "pos",
///    "annotations": [{"target": [start, end], "lu", "frame",
///                     "arguments": [{"start", "end", "role"}]}]}
/// with 0-based inclusive indices. Unknown fields are rejected; every
/// annotation is validated against the ontology (argument length capped only
/// by the sentence). Errors carry the 1-based line number of the record.
/// An empty "frame" marks a target with no frame yet (prediction input).
std::vector<Sentence> read_frames(std::istream& in, const Ontology& ontology,
                                  const std::string& source = "<stream>");
std::vector<Sentence> read_frames(const std::string& path, const Ontology& ontology);

void write_frames(std::ostream& out, const std::vector<Sentence>& sentences);
void write_frames(const std::string& path, const std::vector<Sentence>& sentences);

/// {"frames": {name: {"roles": [...]}}, "lus": {lu: [frame, ...]}}. Ids follow
/// file order.
Ontology read_ontology(std::istream& in, const std::string& source = "<stream>");
Ontology read_ontology(const std::string& path);
void write_ontology(std::ostream& out, const Ontology& ontology);
void write_ontology(const std::string& path, const Ontology& ontology);

}  // namespace jointsem
