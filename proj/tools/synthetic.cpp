// Writes a seeded synthetic corpus: ontology.json, fn-{train,dev}.jsonl and
// dm-{train,dev}.sdp.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "jointsem/core/error.hpp"
#include "jointsem/data/synthetic.hpp"
#include "jointsem/io/frames.hpp"
#include "jointsem/io/sdp.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic frame/dependency corpus"};
  jointsem::SyntheticConfig config;
  std::string out_dir;
  app.add_option("--out-dir", out_dir)->required();
  app.add_option("--seed", config.seed)->capture_default_str();
  app.add_option("--fn-train", config.fn_train)->capture_default_str();
  app.add_option("--dm-train", config.dm_train)->capture_default_str();
  app.add_option("--fn-dev", config.fn_dev)->capture_default_str();
  app.add_option("--dm-dev", config.dm_dev)->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    auto corpus = jointsem::generate_synthetic(config);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    jointsem::write_ontology((dir / "ontology.json").string(), corpus.ontology);
    jointsem::write_frames((dir / "fn-train.jsonl").string(), corpus.fn_train);
    jointsem::write_frames((dir / "fn-dev.jsonl").string(), corpus.fn_dev);
    jointsem::write_sdp((dir / "dm-train.sdp").string(), corpus.dm_train);
    jointsem::write_sdp((dir / "dm-dev.sdp").string(), corpus.dm_dev);
  } catch (const jointsem::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
