#include "jointsem/pruning/rules.hpp"

#include <algorithm>
#include <map>

namespace jointsem {

namespace {

void fill_recall(PruneReport& report, const std::set<std::pair<int, int>>& gold) {
  report.gold = static_cast<int>(gold.size());
  for (const auto& g : gold) report.gold_retained += static_cast<int>(report.retained.count(g));
  report.recall = gold.empty() ? 1.0 : static_cast<double>(report.gold_retained) / report.gold;
}

}  // namespace

PruneReport select_spans(const std::vector<SpanPosterior>& posteriors, int sentence_length,
                         const PruneConfig& config, const std::set<std::pair<int, int>>& gold) {
  const double threshold = span_threshold(sentence_length);
  PruneReport report;
  for (const SpanPosterior& s : posteriors) {
    if (s.end - s.start + 1 > config.max_span_length) continue;
    if (s.posterior >= threshold) report.retained.insert({s.start, s.end});
  }
  fill_recall(report, gold);
  return report;
}

PruneReport select_arcs(const std::vector<ArcPosterior>& posteriors, const PruneConfig& config,
                        const std::set<std::pair<int, int>>& gold) {
  std::map<int, std::vector<ArcPosterior>> by_dependent;
  for (const ArcPosterior& a : posteriors) {
    if (a.posterior > config.arc_floor) by_dependent[a.dependent].push_back(a);
  }
  PruneReport report;
  for (auto& [dependent, heads] : by_dependent) {
    std::sort(heads.begin(), heads.end(), [](const ArcPosterior& a, const ArcPosterior& b) {
      if (a.posterior != b.posterior) return a.posterior > b.posterior;
      return a.head < b.head;
    });
    const int keep = std::min<int>(config.top_k, static_cast<int>(heads.size()));
    for (int k = 0; k < keep; ++k) report.retained.insert({heads[k].head, dependent});
  }
  fill_recall(report, gold);
  return report;
}

}  // namespace jointsem
