#include "jointsem/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "jointsem/core/error.hpp"

namespace jointsem {

namespace {

using TargetKey = std::tuple<int, int, std::string>;

TargetKey key_of(const Target& t) { return {t.start, t.end, t.lu}; }

void check_aligned(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted) {
  if (gold.size() != predicted.size()) {
    throw ValidationError("misaligned corpora: " + std::to_string(gold.size()) + " gold vs " +
                          std::to_string(predicted.size()) + " predicted sentences");
  }
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if (gold[k].id != predicted[k].id || gold[k].size() != predicted[k].size()) {
      throw ValidationError("misaligned corpora at sentence " + std::to_string(k) + " ('" + gold[k].id +
                            "' vs '" + predicted[k].id + "')");
    }
  }
}

const std::vector<FrameParse>& parses_of(const Sentence& s) {
  static const std::vector<FrameParse> none;
  const auto* fa = s.frames();
  return fa ? fa->parses : none;
}

/// Calls visit(gold parse, predicted parse or nullptr) for every gold target.
template <typename Visit>
void for_each_target(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted, Visit&& visit) {
  check_aligned(gold, predicted);
  for (std::size_t k = 0; k < gold.size(); ++k) {
    std::map<TargetKey, const FrameParse*> by_target;
    for (const auto& p : parses_of(predicted[k])) by_target[key_of(p.target)] = &p;
    std::set<TargetKey> seen;
    for (const auto& g : parses_of(gold[k])) {
      auto it = by_target.find(key_of(g.target));
      seen.insert(key_of(g.target));
      visit(g, it == by_target.end() ? nullptr : it->second);
    }
    for (const auto& [key, p] : by_target) {
      if (!seen.count(key)) {
        throw ValidationError("misaligned corpora: sentence '" + gold[k].id + "' has a predicted target '" +
                              p->target.lu + "' at " + std::to_string(p->target.start) + " absent from gold");
      }
    }
  }
}

bool overlaps(const ArgumentSpan& a, const ArgumentSpan& b) { return a.start <= b.end && b.start <= a.end; }

bool same_span(const ArgumentSpan& a, const ArgumentSpan& b) { return a.start == b.start && a.end == b.end; }

}  // namespace

FnEvalResult eval_frames(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted,
                         const Ontology& ontology) {
  FnEvalResult result;
  for_each_target(gold, predicted, [&](const FrameParse& g, const FrameParse* p) {
    ++result.targets;
    int lu = ontology.lu_id(g.target.lu);
    bool ambiguous = lu >= 0 && ontology.frames_of(lu).size() >= 2;
    if (ambiguous) ++result.ambiguous_targets;
    result.parts.gold += 1 + static_cast<long>(g.arguments.size());
    if (p == nullptr) return;
    result.parts.predicted += 1 + static_cast<long>(p->arguments.size());
    if (p->frame == g.frame) {
      ++result.parts.correct;
      ++result.frames_correct;
      if (ambiguous) ++result.ambiguous_correct;
    }
    std::multiset<ArgumentSpan> remaining(g.arguments.begin(), g.arguments.end());
    for (const auto& a : p->arguments) {
      auto it = remaining.find(a);
      if (it != remaining.end()) {
        ++result.parts.correct;
        remaining.erase(it);
      }
    }
  });
  return result;
}

Prf eval_sdp(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted, bool include_top) {
  check_aligned(gold, predicted);
  Prf result;
  auto triples = [&](const Sentence& s) {
    std::set<Arc> out;
    if (const auto* g = s.graph()) {
      out.insert(g->arcs.begin(), g->arcs.end());
      if (include_top && g->top) out.insert(Arc{kRoot, *g->top, ""});
    }
    return out;
  };
  for (std::size_t k = 0; k < gold.size(); ++k) {
    auto g = triples(gold[k]);
    auto p = triples(predicted[k]);
    result.gold += static_cast<long>(g.size());
    result.predicted += static_cast<long>(p.size());
    for (const Arc& a : p) result.correct += static_cast<long>(g.count(a));
  }
  return result;
}

ErrorBreakdown error_breakdown(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted) {
  ErrorBreakdown out;
  for_each_target(gold, predicted, [&](const FrameParse& g, const FrameParse* p) {
    static const FrameParse empty;
    const FrameParse& pred = p ? *p : empty;
    const bool frame_ok = p && p->frame == g.frame;
    if (!frame_ok) ++out.frame;

    std::vector<ArgumentSpan> unmatched_gold;
    std::vector<ArgumentSpan> unmatched_pred;
    std::multiset<ArgumentSpan> remaining(g.arguments.begin(), g.arguments.end());
    for (const auto& a : pred.arguments) {
      auto it = remaining.find(a);
      if (it != remaining.end()) {
        remaining.erase(it);
      } else {
        unmatched_pred.push_back(a);
      }
    }
    unmatched_gold.assign(remaining.begin(), remaining.end());
    std::vector<char> consumed(unmatched_gold.size(), 0);

    for (const auto& a : unmatched_pred) {
      auto find = [&](auto&& predicate) -> int {
        for (std::size_t k = 0; k < unmatched_gold.size(); ++k) {
          if (!consumed[k] && predicate(unmatched_gold[k])) return static_cast<int>(k);
        }
        return -1;
      };
      if (int k = find([&](const ArgumentSpan& b) { return same_span(a, b); }); k >= 0) {
        consumed[k] = 1;
        ++out.role;
        if (frame_ok) ++out.role_correct_frame;
      } else if (int k2 = find([&](const ArgumentSpan& b) { return b.role == a.role && overlaps(a, b); });
                 k2 >= 0) {
        consumed[k2] = 1;
        ++out.span;
      } else if (std::none_of(g.arguments.begin(), g.arguments.end(),
                              [&](const ArgumentSpan& b) { return overlaps(a, b); })) {
        ++out.argument;
      } else {
        ++out.span;
      }
    }
    for (std::size_t k = 0; k < unmatched_gold.size(); ++k) {
      if (consumed[k]) continue;
      bool touched = std::any_of(pred.arguments.begin(), pred.arguments.end(),
                                 [&](const ArgumentSpan& b) { return overlaps(unmatched_gold[k], b); });
      if (touched) {
        ++out.span;
      } else {
        ++out.missing;
      }
    }
  });
  return out;
}

int length_bin(int length) {
  return static_cast<int>(std::floor(std::log(static_cast<double>(length)) / std::log(1.6)));
}

std::vector<LengthBin> length_binned_pr(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted) {
  std::map<int, LengthBin> bins;
  auto bin_of = [&](const ArgumentSpan& a) -> LengthBin& {
    int b = length_bin(a.length());
    auto& entry = bins[b];
    entry.bin = b;
    return entry;
  };
  for_each_target(gold, predicted, [&](const FrameParse& g, const FrameParse* p) {
    static const FrameParse empty;
    const FrameParse& pred = p ? *p : empty;
    std::multiset<ArgumentSpan> gold_set(g.arguments.begin(), g.arguments.end());
    std::multiset<ArgumentSpan> pred_set(pred.arguments.begin(), pred.arguments.end());
    for (const auto& a : g.arguments) {
      auto& b = bin_of(a);
      ++b.gold;
      if (pred_set.count(a)) ++b.gold_matched;
    }
    for (const auto& a : pred.arguments) {
      auto& b = bin_of(a);
      ++b.predicted;
      if (gold_set.count(a)) ++b.predicted_matched;
    }
  });
  std::vector<LengthBin> out;
  for (const auto& [b, entry] : bins) out.push_back(entry);
  return out;
}

std::string to_csv(const ErrorBreakdown& e) {
  std::ostringstream os;
  os << "category,count,percent\n";
  auto row = [&](const char* name, long count) { os << name << ',' << count << ',' << e.percent(count) << '\n'; };
  row("frame", e.frame);
  row("role", e.role);
  row("role_correct_frame", e.role_correct_frame);
  row("span", e.span);
  row("argument", e.argument);
  row("missing", e.missing);
  return os.str();
}

std::string to_csv(const std::vector<LengthBin>& bins) {
  std::ostringstream os;
  os << "bin,precision,recall,gold_count,predicted_count\n";
  for (const auto& b : bins) {
    os << b.bin << ',' << b.precision() << ',' << b.recall() << ',' << b.gold << ',' << b.predicted << '\n';
  }
  return os.str();
}

}  // namespace jointsem
