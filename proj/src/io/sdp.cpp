#include "jointsem/io/sdp.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "jointsem/core/error.hpp"

namespace jointsem {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

struct Row {
  long line;
  std::vector<std::string> fields;
};

class BlockReader {
 public:
  BlockReader(const std::string& source) : source_(source) {}

  Sentence finish(std::string id, const std::vector<Row>& rows) const {
    Sentence s;
    s.id = std::move(id);
    DependencyGraph graph;
    std::vector<int> predicates;
    const std::size_t width = rows.front().fields.size();
    if (width < 6) throw ParseError(source_, rows.front().line, "expected at least 6 columns");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Row& row = rows[k];
      if (row.fields.size() != width) {
        throw ParseError(source_, row.line,
                         "ragged row: " + std::to_string(row.fields.size()) + " columns, block has " +
                             std::to_string(width));
      }
      if (row.fields[0] != std::to_string(k + 1)) {
        throw ParseError(source_, row.line, "token id '" + row.fields[0] + "', expected " + std::to_string(k + 1));
      }
      s.tokens.push_back({row.fields[1], row.fields[2], row.fields[3]});
      const int t = static_cast<int>(k);
      if (flag(row, 4)) {
        if (graph.top) throw ParseError(source_, row.line, "second top token");
        graph.top = t;
      }
      if (flag(row, 5)) predicates.push_back(t);
    }
    if (width - 6 != predicates.size()) {
      throw ParseError(source_, rows.front().line,
                       std::to_string(width - 6) + " argument columns for " + std::to_string(predicates.size()) +
                           " predicates");
    }
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (std::size_t p = 0; p < predicates.size(); ++p) {
        const std::string& label = rows[k].fields[6 + p];
        if (label == "_") continue;
        if (label.empty()) throw ParseError(source_, rows[k].line, "empty label");
        const int head = predicates[p];
        const int dep = static_cast<int>(k);
        if (head == dep) throw ParseError(source_, rows[k].line, "self loop on token " + std::to_string(k + 1));
        if (!seen.insert({head, dep}).second) {
          throw ParseError(source_, rows[k].line, "duplicate arc " + std::to_string(head + 1) + "->" + std::to_string(dep + 1));
        }
        graph.arcs.push_back({head, dep, label});
      }
    }
    std::sort(graph.arcs.begin(), graph.arcs.end());
    s.supervision = std::move(graph);
    return s;
  }

 private:
  bool flag(const Row& row, std::size_t column) const {
    const std::string& f = row.fields[column];
    if (f == "+") return true;
    if (f == "-") return false;
    throw ParseError(source_, row.line, "flag column " + std::to_string(column + 1) + " is '" + f + "', expected + or -");
  }

  std::string source_;
};

}  // namespace

std::vector<Sentence> read_sdp(std::istream& in, const std::string& source) {
  std::vector<Sentence> out;
  BlockReader reader(source);
  std::string id;
  bool have_id = false;
  std::vector<Row> rows;
  std::string line;
  long number = 0;
  auto flush = [&] {
    if (!rows.empty()) {
      out.push_back(reader.finish(have_id ? id : std::to_string(out.size() + 1), rows));
    } else if (have_id) {
      throw ParseError(source, number, "sentence '" + id + "' has no tokens");
    }
    rows.clear();
    have_id = false;
  };
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
    } else if (line.front() == '#') {
      if (!rows.empty()) throw ParseError(source, number, "comment inside a token block");
      if (!have_id) {
        id = line.substr(1);
        have_id = true;
      }
    } else {
      rows.push_back({number, split_tabs(line)});
    }
  }
  flush();
  return out;
}

std::vector<Sentence> read_sdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open SDP file '" + path + "'");
  return read_sdp(in, path);
}

void write_sdp(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const Sentence& s : sentences) {
    const DependencyGraph* graph = s.graph();
    if (graph == nullptr) throw ValidationError("sentence '" + s.id + "' has no dependency graph");
    validate(*graph, s.size());
    const int n = s.size();
    std::vector<char> is_pred(n, 0);
    for (const Arc& a : graph->arcs) is_pred[a.head] = 1;
    std::vector<int> column(n, -1);
    int predicates = 0;
    for (int t = 0; t < n; ++t) {
      if (is_pred[t]) column[t] = predicates++;
    }
    std::vector<std::vector<std::string>> labels(n, std::vector<std::string>(predicates, "_"));
    const std::optional<int> top = graph->top;
    for (const Arc& a : graph->arcs) {
      std::string& cell = labels[a.dependent][column[a.head]];
      if (cell != "_") {
        throw ValidationError("sentence '" + s.id + "' has two arcs " + std::to_string(a.head + 1) + "->" +
                              std::to_string(a.dependent + 1));
      }
      cell = a.label;
    }
    out << '#' << s.id << '\n';
    for (int t = 0; t < n; ++t) {
      const Token& tok = s.tokens[t];
      out << t + 1 << '\t' << tok.form << '\t' << tok.lemma << '\t' << tok.pos << '\t'
          << (top == t ? '+' : '-') << '\t' << (is_pred[t] ? '+' : '-');
      for (const std::string& l : labels[t]) out << '\t' << l;
      out << '\n';
    }
    out << '\n';
  }
}

void write_sdp(const std::string& path, const std::vector<Sentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write SDP file '" + path + "'");
  write_sdp(out, sentences);
}

}  // namespace jointsem
