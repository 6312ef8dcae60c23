#include "jointsem/inference/decode.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "jointsem/inference/brute_force.hpp"

namespace jointsem {

namespace {

VariableRole role_of(const Part& part) {
  switch (kind_of(part)) {
    case PartKind::Predicate: return VariableRole::Predicate;
    case PartKind::Argument: return VariableRole::Argument;
    case PartKind::Head: return VariableRole::Head;
    case PartKind::UnlabeledArc:
      return std::get<UnlabeledArcPart>(part).head == kRoot ? VariableRole::TopArc : VariableRole::Arc;
    case PartKind::LabeledArc: return VariableRole::LabeledArc;
    case PartKind::CrossTask: break;
  }
  return VariableRole::Generic;
}

bool is_frame_part(PartKind kind) {
  return kind == PartKind::Predicate || kind == PartKind::Argument;
}

}  // namespace

BuiltGraph build_factor_graph(const CandidateSpace& space, std::span<const double> scores,
                              const DecodeOptions& options) {
  if (static_cast<int>(scores.size()) != space.size()) {
    throw std::invalid_argument("build_factor_graph: score vector does not match the candidate space");
  }
  const bool frames = options.mode != DecodeMode::DependenciesOnly;
  BuiltGraph built;
  FactorGraph& g = built.graph;
  built.var_of_part.assign(space.size(), -1);
  auto& var = built.var_of_part;

  for (int p = 0; p < space.size(); ++p) {
    PartKind kind = kind_of(space.part(p));
    if (kind == PartKind::CrossTask || (!frames && is_frame_part(kind))) continue;
    var[p] = g.add_variable(scores[p], role_of(space.part(p)), p);
  }

  if (frames) {
    if (options.mode == DecodeMode::LatentCompletion) {
      std::vector<char> gold(space.size(), 0);
      for (int p : options.gold_frame) gold.at(p) = 1;
      for (PartKind kind : {PartKind::Predicate, PartKind::Argument}) {
        for (int p : space.of_kind(kind)) g.clamp[var[p]] = gold[p];
      }
    }
    std::vector<int> predicates;
    for (int p : space.of_kind(PartKind::Predicate)) predicates.push_back(var[p]);
    if (!predicates.empty()) g.add_xor(predicates);

    std::vector<int> arguments;
    std::vector<std::pair<int, int>> spans;
    for (int p : space.of_kind(PartKind::Argument)) {
      const auto& a = std::get<ArgumentPart>(space.part(p));
      g.add_implication(var[p], var[space.predicate_index(a.frame)]);
      arguments.push_back(var[p]);
      spans.emplace_back(a.start, a.end);
    }
    if (!arguments.empty()) g.add_semi_markov(arguments, spans, space.length());
  }

  std::vector<int> tops;
  std::map<std::pair<int, int>, std::vector<int>> deterministic;
  std::vector<char> is_deterministic;
  for (int label : options.deterministic_labels) {
    if (label >= static_cast<int>(is_deterministic.size())) is_deterministic.resize(label + 1, 0);
    is_deterministic[label] = 1;
  }
  for (int p : space.of_kind(PartKind::UnlabeledArc)) {
    const auto& arc = std::get<UnlabeledArcPart>(space.part(p));
    if (arc.head == kRoot) {
      tops.push_back(var[p]);
      continue;
    }
    auto labels = space.labels_of_arc(p);
    if (!labels.empty()) {
      std::vector<int> literals{var[p]};
      std::vector<char> negated{1};
      for (int l : labels) {
        literals.push_back(var[l]);
        negated.push_back(0);
        int label = std::get<LabeledArcPart>(space.part(l)).label;
        if (label < static_cast<int>(is_deterministic.size()) && is_deterministic[label]) {
          deterministic[{arc.head, label}].push_back(var[l]);
        }
      }
      g.add_xor(std::move(literals), std::move(negated));
    }
    if (int h = space.head_index(arc.head); h >= 0) g.add_implication(var[p], var[h]);
  }
  if (!tops.empty()) g.add_xor(tops);
  for (auto& [key, vars] : deterministic) {
    if (vars.size() >= 2) g.add_at_most_one(vars);
  }

  if (frames) {
    for (int c : space.of_kind(PartKind::CrossTask)) {
      if (std::abs(scores[c]) <= options.drop_epsilon) continue;
      const auto& cross = std::get<CrossTaskPart>(space.part(c));
      g.add_pair(var[cross.argument], var[cross.arc], scores[c]);
    }
  }
  return built;
}

Decoded decode(const CandidateSpace& space, const DecodeOptions& options,
               std::span<const double> scores) {
  if (scores.empty()) scores = space.scores();
  if (options.mode == DecodeMode::LatentCompletion && options.gold_frame.empty() &&
      !space.of_kind(PartKind::Predicate).empty()) {
    throw std::invalid_argument("latent completion decoding needs the gold frame parts");
  }
  BuiltGraph built = build_factor_graph(space, scores, options);
  Decoded out;
  std::vector<char> x;
  if (options.use_brute_force) {
    auto result = brute_force_map(built.graph);
    x = std::move(result.assignment);
    out.objective = result.objective;
  } else {
    auto result = ad3_solve(built.graph, options.solver);
    x = std::move(result.assignment);
    out.objective = result.objective;
    out.status = result.status;
    out.iterations = result.iterations;
  }
  std::vector<int> active;
  for (int v = 0; v < built.graph.num_variables(); ++v) {
    if (x[v]) active.push_back(built.graph.part[v]);
  }
  if (options.mode != DecodeMode::DependenciesOnly) {
    out.parts = close_over_cross_task(space, std::move(active));
  } else {
    std::sort(active.begin(), active.end());
    out.parts = std::move(active);
  }
  return out;
}

double total_score(std::span<const double> scores, std::span<const int> parts) {
  double total = 0.0;
  for (int p : parts) total += scores[p];
  return total;
}

std::vector<double> cost_augment(std::span<const double> scores, std::span<const int> gold,
                                 const std::vector<char>& costed, const CostConfig& cost) {
  std::vector<double> out(scores.begin(), scores.end());
  std::vector<char> in_gold(out.size(), 0);
  for (int p : gold) in_gold.at(p) = 1;
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (!costed.empty() && !costed[p]) continue;
    out[p] += in_gold[p] ? -cost.false_negative_cost : cost.false_positive_cost;
  }
  return out;
}

CandidateSpace drop_sparse_cross_task(const CandidateSpace& space, double epsilon) {
  std::vector<char> keep(space.size(), 0);
  for (int c : space.of_kind(PartKind::CrossTask)) keep[c] = std::abs(space.scores()[c]) > epsilon;
  return space.retain_cross_task(keep);
}

std::optional<FrameParse> frame_parse_of(const CandidateSpace& space, std::span<const int> parts,
                                         const Ontology& ontology) {
  if (!space.target()) return std::nullopt;
  int frame = -1;
  for (int p : parts) {
    if (const auto* pred = std::get_if<PredicatePart>(&space.part(p))) frame = pred->frame;
  }
  if (frame < 0) return std::nullopt;
  FrameParse parse;
  parse.target = *space.target();
  parse.frame = ontology.frame_name(frame);
  for (int p : parts) {
    const auto* arg = std::get_if<ArgumentPart>(&space.part(p));
    if (arg && arg->frame == frame) {
      parse.arguments.push_back({arg->start, arg->end, ontology.role_name(arg->role)});
    }
  }
  std::sort(parse.arguments.begin(), parse.arguments.end());
  return parse;
}

DependencyGraph dependency_graph_of(const CandidateSpace& space, std::span<const int> parts,
                                    const std::vector<std::string>& labels) {
  DependencyGraph graph;
  std::vector<char> on(space.size(), 0);
  for (int p : parts) on[p] = 1;
  for (int p : parts) {
    if (const auto* arc = std::get_if<UnlabeledArcPart>(&space.part(p))) {
      if (arc->head == kRoot) {
        graph.top = arc->dependent;
      } else if (space.labels_of_arc(p).empty()) {
        graph.arcs.push_back({arc->head, arc->dependent, ""});
      }
    } else if (const auto* l = std::get_if<LabeledArcPart>(&space.part(p))) {
      graph.arcs.push_back({l->head, l->dependent, labels.at(l->label)});
    }
  }
  std::sort(graph.arcs.begin(), graph.arcs.end());
  return graph;
}

}  // namespace jointsem
