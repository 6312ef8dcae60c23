// Command-line entry point. Exit codes: 0 success, 1 invalid input or usage,
// 2 internal failure (including a failed oracle check).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jointsem/core/error.hpp"
#include "jointsem/eval/metrics.hpp"
#include "jointsem/inference/random_instance.hpp"
#include "jointsem/io/checkpoint.hpp"
#include "jointsem/io/embeddings.hpp"
#include "jointsem/io/frames.hpp"
#include "jointsem/io/sdp.hpp"
#include "jointsem/training/trainer.hpp"

using namespace jointsem;

namespace {

struct ModelFlags {
  ModelConfig model;
  bool no_joint = false;
  bool no_cross_task = false;

  void attach(CLI::App* app) {
    app->add_flag("--no-joint", no_joint, "Frame-only model; dependency corpora are ignored");
    app->add_flag("--no-cross-task", no_cross_task, "Multitask model without cross-task parts");
    app->add_option("--word-dim", model.encoder.word_dim)->capture_default_str();
    app->add_option("--lemma-dim", model.encoder.lemma_dim)->capture_default_str();
    app->add_option("--pos-dim", model.encoder.pos_dim)->capture_default_str();
    app->add_option("--hidden", model.encoder.hidden, "BiLSTM width per direction")->capture_default_str();
    app->add_option("--layers", model.encoder.layers)->capture_default_str();
    app->add_option("--mlp", model.encoder.mlp)->capture_default_str();
    app->add_option("--embedding-dim", model.embedding, "Frame, LU, role and label embeddings")->capture_default_str();
    app->add_option("--rank", model.rank)->capture_default_str();
    app->add_option("--max-span", model.max_span_length)->capture_default_str();
    app->add_option("--word-dropout", model.word_dropout)->capture_default_str();
  }

  ModelConfig resolve() const {
    ModelConfig c = model;
    c.joint = !no_joint;
    c.cross_task = !no_joint && !no_cross_task;
    return c;
  }
};

struct Paths {
  std::string fn_train, fn_exemplars, fn_dev, dm_train, dm_dev;
};

Corpora read_corpora(const Paths& p, const Ontology& ontology) {
  Corpora c;
  if (!p.fn_train.empty()) c.fn_train = read_frames(p.fn_train, ontology);
  if (!p.fn_exemplars.empty()) c.fn_exemplars = read_frames(p.fn_exemplars, ontology);
  if (!p.fn_dev.empty()) c.fn_dev = read_frames(p.fn_dev, ontology);
  if (!p.dm_train.empty()) c.dm_train = read_sdp(p.dm_train);
  if (!p.dm_dev.empty()) c.dm_dev = read_sdp(p.dm_dev);
  return c;
}

std::vector<std::string> split_commas(const std::string& list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string::npos) comma = list.size();
    if (comma > start) out.push_back(list.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

void print_metric(const char* name, double value) { std::printf("%s\t%.3f\n", name, value); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint frame-semantic and semantic-dependency parser"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a parser");
  Paths train_paths;
  std::string ontology_path, embeddings_path, out_path, pruner_path, metrics_path;
  ModelFlags model_flags;
  TrainConfig train_config;
  int threads = 0;
  train_cmd->add_option("--fn-train", train_paths.fn_train, "Frame-annotated training sentences (JSONL)");
  train_cmd->add_option("--fn-exemplars", train_paths.fn_exemplars, "Exemplar sentences, subsampled per epoch");
  train_cmd->add_option("--fn-dev", train_paths.fn_dev);
  train_cmd->add_option("--dm-train", train_paths.dm_train, "Dependency-annotated training sentences (SDP)");
  train_cmd->add_option("--dm-dev", train_paths.dm_dev);
  train_cmd->add_option("--ontology", ontology_path)->required();
  train_cmd->add_option("--embeddings", embeddings_path, "Pretrained word vectors (text)");
  train_cmd->add_option("--pruner", pruner_path, "Pruner checkpoint restricting candidates");
  train_cmd->add_option("--arc-top-k", train_config.prune.top_k, "Heads kept per dependent")->capture_default_str();
  train_cmd->add_option("--arc-floor", train_config.prune.arc_floor, "Arc posteriors must exceed this")
      ->capture_default_str();
  train_cmd->add_option("--out", out_path, "Model checkpoint to write")->required();
  train_cmd->add_option("--metrics", metrics_path, "Also write the per-epoch TSV here");
  train_cmd->add_option("--seed", train_config.seed)->capture_default_str();
  train_cmd->add_option("--lambda", train_config.lambda, "L1 weight on cross-task scores")->capture_default_str();
  train_cmd->add_option("--epochs", train_config.epochs)->capture_default_str();
  train_cmd->add_option("--lr", train_config.learning_rate)->capture_default_str();
  train_cmd->add_option("--anneal-every", train_config.anneal_every)->capture_default_str();
  train_cmd->add_option("--anneal-rate", train_config.anneal_rate)->capture_default_str();
  train_cmd->add_option("--clip", train_config.clip)->capture_default_str();
  train_cmd->add_option("--l2", train_config.l2)->capture_default_str();
  train_cmd->add_option("--exemplar-fraction", train_config.exemplar_fraction)->capture_default_str();
  train_cmd->add_option("--drop-epsilon", train_config.drop_epsilon)->capture_default_str();
  train_cmd->add_option("--threads", train_config.threads, "Dev prediction threads (0 = all cores)")->capture_default_str();
  model_flags.attach(train_cmd);

  // pretrain-pruner
  auto* pretrain_cmd = app.add_subcommand("pretrain-pruner", "Train the candidate pruner");
  Paths pruner_paths;
  PrunerConfig pruner_config;
  PretrainOptions pretrain_options;
  pretrain_cmd->add_option("--fn-train", pruner_paths.fn_train);
  pretrain_cmd->add_option("--dm-train", pruner_paths.dm_train);
  pretrain_cmd->add_option("--ontology", ontology_path)->required();
  pretrain_cmd->add_option("--out", out_path)->required();
  pretrain_cmd->add_option("--epochs", pretrain_options.epochs)->capture_default_str();
  pretrain_cmd->add_option("--lr", pretrain_options.learning_rate)->capture_default_str();
  pretrain_cmd->add_option("--seed", pretrain_options.seed)->capture_default_str();
  pretrain_cmd->add_option("--hidden", pruner_config.encoder.hidden)->capture_default_str();
  pretrain_cmd->add_option("--max-span", pruner_config.max_span_length)->capture_default_str();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Parse a corpus");
  std::string model_path, input_path, format, output_path, ensemble;
  bool allow_mismatch = false;
  auto* model_opt = predict_cmd->add_option("--model", model_path);
  auto* ensemble_opt = predict_cmd->add_option("--ensemble", ensemble, "Comma-separated checkpoints whose scores are averaged");
  model_opt->excludes(ensemble_opt);
  predict_cmd->add_option("--input", input_path)->required();
  predict_cmd->add_option("--format", format)->required()->check(CLI::IsMember({"fn", "sdp"}));
  predict_cmd->add_option("--output", output_path)->required();
  PruneConfig predict_prune;
  predict_cmd->add_option("--pruner", pruner_path);
  predict_cmd->add_option("--arc-top-k", predict_prune.top_k, "Heads kept per dependent")->capture_default_str();
  predict_cmd->add_option("--arc-floor", predict_prune.arc_floor, "Arc posteriors must exceed this")
      ->capture_default_str();
  predict_cmd->add_option("--ontology", ontology_path, "Check the model against this ontology");
  predict_cmd->add_flag("--allow-ontology-mismatch", allow_mismatch);
  predict_cmd->add_option("--threads", threads)->capture_default_str();

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold annotations");
  std::string gold_path, pred_path;
  bool no_top = false;
  evaluate_cmd->add_option("--format", format)->required()->check(CLI::IsMember({"fn", "sdp"}));
  evaluate_cmd->add_option("--gold", gold_path)->required();
  evaluate_cmd->add_option("--pred", pred_path)->required();
  evaluate_cmd->add_option("--ontology", ontology_path, "Required for --format fn");
  evaluate_cmd->add_flag("--no-top", no_top, "Exclude top arcs from dependency scoring");

  // oracle-check
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare the decoder with exhaustive search");
  int oracle_n = 100;
  std::uint64_t oracle_seed = 1;
  oracle_cmd->add_option("--n", oracle_n)->capture_default_str();
  oracle_cmd->add_option("--seed", oracle_seed)->capture_default_str();

  // export-analysis
  auto* export_cmd = app.add_subcommand("export-analysis", "Write error-breakdown and length-bin CSVs");
  std::string out_dir;
  export_cmd->add_option("--gold", gold_path)->required();
  export_cmd->add_option("--pred", pred_path)->required();
  export_cmd->add_option("--ontology", ontology_path)->required();
  export_cmd->add_option("--out-dir", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e) == 0) return 0;
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*train_cmd) {
      Ontology ontology = read_ontology(ontology_path);
      Corpora corpora = read_corpora(train_paths, ontology);
      if (corpora.fn_train.empty() && corpora.dm_train.empty()) throw ValidationError("no training data given");
      std::optional<EmbeddingTable> embeddings;
      if (!embeddings_path.empty()) embeddings = load_embeddings(embeddings_path);
      auto vocab = std::make_shared<ModelVocabularies>(build_vocabularies(corpora, embeddings ? &*embeddings : nullptr));
      std::mt19937_64 rng(train_config.seed);
      Model<double> model(model_flags.resolve(), ontology, vocab, rng);
      if (embeddings) initialize_word_embeddings(model, *embeddings);
      std::unique_ptr<Pruner<double>> pruner;
      if (!pruner_path.empty()) pruner = load_pruner(pruner_path);
      train_config.prune.max_span_length = model.config().max_span_length;
      std::ofstream metrics;
      if (!metrics_path.empty()) {
        metrics.open(metrics_path);
        if (!metrics) throw ValidationError("cannot write '" + metrics_path + "'");
      }
      std::cout << "epoch\tlr\tloss\tdev_fn_f1\tdev_sdp_f1\tseconds\n";
      TrainResult result = train(model, corpora, train_config, pruner.get(), [&](const EpochRecord& r) {
        std::cout << metric_line(r) << std::endl;
        if (metrics) metrics << metric_line(r) << '\n';
      });
      save_model(model, out_path);
      std::cout << "best epoch " << result.best_epoch << ", dev FN F1 " << result.best_dev_fn_f1 << "\n";
    } else if (*pretrain_cmd) {
      Ontology ontology = read_ontology(ontology_path);
      Corpora corpora = read_corpora(pruner_paths, ontology);
      if (corpora.fn_train.empty() && corpora.dm_train.empty()) throw ValidationError("no training data given");
      auto tokens = std::make_shared<TokenVocabularies>(build_vocabularies(corpora).tokens);
      std::mt19937_64 rng(pretrain_options.seed);
      Pruner<double> pruner(pruner_config, tokens, rng);
      PretrainReport report = pretrain_pruner(pruner, corpora.fn_train, corpora.dm_train, pretrain_options);
      for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
        std::cout << e << '\t' << report.epoch_loss[e] << '\n';
      }
      save_pruner(pruner, out_path);
    } else if (*predict_cmd) {
      std::vector<std::string> paths = ensemble.empty() ? std::vector<std::string>{model_path} : split_commas(ensemble);
      if (paths.empty() || paths.front().empty()) throw ValidationError("predict needs --model or --ensemble");
      std::optional<Ontology> expected;
      if (!ontology_path.empty()) expected = read_ontology(ontology_path);
      LoadOptions load{expected ? &*expected : nullptr, allow_mismatch};
      std::vector<std::unique_ptr<Model<double>>> models;
      for (const std::string& p : paths) {
        auto loaded = load_model(p, load);
        for (const std::string& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
        models.push_back(std::move(loaded.value));
      }
      std::vector<const Model<double>*> members;
      for (const auto& m : models) members.push_back(m.get());
      Predictor predictor(*members.front());
      if (members.size() > 1) {
        predictor.scorer = [members](const Sentence& s, const CandidateSpace& space) {
          return ensemble_scores(members, s, space);
        };
      }
      std::unique_ptr<Pruner<double>> pruner;
      if (!pruner_path.empty()) {
        pruner = load_pruner(pruner_path);
        predictor.pruner = pruner.get();
        predictor.prune = predict_prune;
        predictor.prune.max_span_length = members.front()->config().max_span_length;
      }
      predictor.threads = threads;
      if (format == "fn") {
        auto input = read_frames(input_path, members.front()->ontology());
        write_frames(output_path, predictor.corpus(input));
      } else {
        auto input = read_sdp(input_path);
        write_sdp(output_path, predictor.corpus(input));
      }
    } else if (*evaluate_cmd) {
      if (format == "fn") {
        if (ontology_path.empty()) throw ValidationError("--ontology is required for --format fn");
        Ontology ontology = read_ontology(ontology_path);
        FnEvalResult r = eval_frames(read_frames(gold_path, ontology), read_frames(pred_path, ontology), ontology);
        print_metric("precision", r.parts.precision());
        print_metric("recall", r.parts.recall());
        print_metric("F1", r.parts.f1());
        print_metric("frame_accuracy", r.frame_accuracy());
        print_metric("ambiguous_frame_accuracy", r.ambiguous_accuracy());
      } else {
        Prf r = eval_sdp(read_sdp(gold_path), read_sdp(pred_path), !no_top);
        print_metric("precision", r.precision());
        print_metric("recall", r.recall());
        print_metric("F1", r.f1());
      }
    } else if (*oracle_cmd) {
      if (oracle_n <= 0) throw ValidationError("--n must be positive");
      OracleReport r = run_oracle_check(oracle_n, oracle_seed, {}, {});
      std::printf("instances\t%d\nexact\t%d\nassignment_mismatches\t%d\nmax_objective_gap\t%.3e\n", r.instances,
                  r.exact, r.assignment_mismatches, r.max_gap);
      if (r.max_gap > 1e-6 || r.assignment_mismatches > 0) {
        std::fprintf(stderr, "oracle check failed\n");
        return 2;
      }
    } else if (*export_cmd) {
      Ontology ontology = read_ontology(ontology_path);
      auto gold = read_frames(gold_path, ontology);
      auto pred = read_frames(pred_path, ontology);
      std::filesystem::create_directories(out_dir);
      const auto dir = std::filesystem::path(out_dir);
      std::ofstream((dir / "error_breakdown.csv").string()) << to_csv(error_breakdown(gold, pred));
      std::ofstream((dir / "length_bins.csv").string()) << to_csv(length_binned_pr(gold, pred));
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
