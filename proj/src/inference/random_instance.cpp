#include "jointsem/inference/random_instance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jointsem/inference/brute_force.hpp"

namespace jointsem {

int joint_variable_count(const CandidateSpace& space) {
  return space.size() - static_cast<int>(space.of_kind(PartKind::CrossTask).size());
}

RandomInstance random_joint_instance(std::mt19937_64& rng, const RandomInstanceConfig& config) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::normal_distribution<double> normal(0.0, config.score_scale);

  RandomInstance inst;
  const int frames = uniform(1, config.max_frames);
  const int labels = uniform(1, config.max_labels);
  std::vector<std::string> frame_names;
  for (int f = 0; f < frames; ++f) {
    std::vector<std::string> roles;
    int count = uniform(1, config.max_roles);
    // Roles are drawn from a shared pool so frames may share role names.
    std::vector<int> pool{0, 1, 2, 3};
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int r = 0; r < count; ++r) roles.push_back("R" + std::to_string(pool[r]));
    frame_names.push_back("F" + std::to_string(f));
    inst.ontology.add_frame(frame_names.back(), roles);
  }
  inst.ontology.add_lu("lu.v", frame_names);
  for (int l = 0; l < labels; ++l) {
    if (uniform(0, 1)) inst.deterministic_labels.push_back(l);
  }

  for (;;) {
    const int n = uniform(1, config.max_length);
    inst.sentence = Sentence{};
    inst.sentence.id = "random";
    for (int i = 0; i < n; ++i) {
      inst.sentence.tokens.push_back({"w" + std::to_string(i), "w" + std::to_string(i), "X"});
    }
    const int t = uniform(0, n - 1);
    inst.target = Target{t, std::min(n - 1, t + uniform(0, 1)), "lu.v"};

    SpaceLimits limits;
    limits.num_labels = labels;
    limits.max_span_length = 3;
    std::set<std::pair<int, int>> spans, arcs;
    int span_count = uniform(1, 3);
    for (int k = 0; k < span_count; ++k) {
      int i = uniform(0, n - 1);
      int j = std::min(n - 1, i + uniform(0, 2));
      spans.insert({i, j});
    }
    int arc_count = uniform(0, 3);
    for (int k = 0; k < arc_count && n > 1; ++k) {
      // Half of the arcs leave the target so that cross-task parts exist.
      int h = uniform(0, 1) ? t : uniform(0, n - 1);
      int d = uniform(0, n - 1);
      if (h != d) arcs.insert({h, d});
    }
    limits.allowed_spans = spans;
    limits.allowed_arcs = arcs;
    CandidateSpace space = build_candidate_space(inst.sentence, &inst.target, inst.ontology, limits);
    if (joint_variable_count(space) > config.max_free_variables) continue;
    for (double& s : space.scores()) s = normal(rng);
    for (int c : space.of_kind(PartKind::CrossTask)) space.scores()[c] = 2.0 * normal(rng);
    inst.space = std::move(space);
    return inst;
  }
}

OracleReport run_oracle_check(int count, std::uint64_t seed, const RandomInstanceConfig& config,
                              const Ad3Options& solver) {
  std::mt19937_64 rng(seed);
  OracleReport report;
  for (int k = 0; k < count; ++k) {
    RandomInstance inst = random_joint_instance(rng, config);
    DecodeOptions options;
    options.deterministic_labels = inst.deterministic_labels;
    options.solver = solver;
    BuiltGraph built = build_factor_graph(inst.space, inst.space.scores(), options);
    SolveResult fast = ad3_solve(built.graph, solver);
    BruteForceResult exact = brute_force_map(built.graph, config.max_free_variables);
    ++report.instances;
    if (fast.status == SolveStatus::Exact) ++report.exact;
    report.max_gap = std::max(report.max_gap, std::abs(fast.objective - exact.objective));
    if (fast.assignment != exact.assignment) ++report.assignment_mismatches;
  }
  return report;
}

}  // namespace jointsem
