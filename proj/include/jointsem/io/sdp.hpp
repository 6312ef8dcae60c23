#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "jointsem/core/sentence.hpp"

namespace jointsem {

/// Tab-separated dependency-graph corpus. Each block is an optional "#id"
/// line followed by token rows: id (1-based), form, lemma, pos, top (+/-),
/// pred (+/-), and one label column per predicate in token order ("_" = no
/// arc). Blocks are separated by blank lines.
///
/// Canonical files (the writer's output) round-trip byte for byte. A "+"
/// pred flag on a token without outgoing arcs is accepted but not preserved.
std::vector<Sentence> read_sdp(std::istream& in, const std::string& source = "<stream>");
std::vector<Sentence> read_sdp(const std::string& path);

/// Throws ValidationError on a sentence without a graph or on two arcs
/// between the same ordered token pair.
void write_sdp(std::ostream& out, const std::vector<Sentence>& sentences);
void write_sdp(const std::string& path, const std::vector<Sentence>& sentences);

}  // namespace jointsem
