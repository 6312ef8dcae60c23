#include "jointsem/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "jointsem/core/error.hpp"
#include "jointsem/io/frames.hpp"

namespace jointsem {

static_assert(std::endian::native == std::endian::little, "checkpoints are little-endian");

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'J', 'S', 'C', 'K'};

std::uint64_t fnv1a(const std::string& bytes, std::size_t length) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (std::size_t k = 0; k < length; ++k) {
    hash ^= static_cast<unsigned char>(bytes[k]);
    hash *= 1099511628211ULL;
  }
  return hash;
}

template <typename T>
void put(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

class Cursor {
 public:
  Cursor(const std::string& bytes, std::size_t end, const std::string& source)
      : bytes_(bytes), end_(end), source_(source) {}

  template <typename T>
  T get(const char* what) {
    T value;
    std::memcpy(&value, take(sizeof(T), what), sizeof(T));
    return value;
  }

  const char* take(std::size_t n, const char* what) {
    if (n > end_ - pos_) fail(std::string("truncated while reading ") + what);
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::size_t position() const { return pos_; }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source_, static_cast<long>(pos_), what + " (position is a byte offset)");
  }

 private:
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
  const std::string& source_;
};

json vocabulary_json(const Vocabulary& v) { return {{"tokens", v.tokens()}, {"counts", v.counts()}}; }

Vocabulary vocabulary_from(const json& j) {
  return Vocabulary::from(j.at("tokens").get<std::vector<std::string>>(), j.at("counts").get<std::vector<long>>());
}

json tokens_json(const TokenVocabularies& v) {
  return {{"words", vocabulary_json(v.words)}, {"lemmas", vocabulary_json(v.lemmas)}, {"pos", vocabulary_json(v.pos)}};
}

TokenVocabularies tokens_from(const json& j) {
  return {vocabulary_from(j.at("words")), vocabulary_from(j.at("lemmas")), vocabulary_from(j.at("pos"))};
}

json encoder_json(const EncoderConfig& c) {
  return {{"word_dim", c.word_dim}, {"lemma_dim", c.lemma_dim}, {"pos_dim", c.pos_dim},
          {"hidden", c.hidden},     {"layers", c.layers},       {"mlp", c.mlp}};
}

EncoderConfig encoder_from(const json& j) {
  EncoderConfig c;
  c.word_dim = j.at("word_dim");
  c.lemma_dim = j.at("lemma_dim");
  c.pos_dim = j.at("pos_dim");
  c.hidden = j.at("hidden");
  c.layers = j.at("layers");
  c.mlp = j.at("mlp");
  return c;
}

void expect_kind(const Checkpoint& c, const std::string& kind, const std::string& path) {
  const std::string stored = c.manifest.value("kind", "");
  if (stored != kind) {
    throw ValidationError("'" + path + "' is a " + (stored.empty() ? "unknown" : stored) + " checkpoint, expected " + kind);
  }
}

}  // namespace

void save_checkpoint(const autodiff::ParameterStore<double>& store, json manifest, const std::string& path) {
  manifest["version"] = kCheckpointVersion;
  const std::string text = manifest.dump();
  std::string out(kMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out += text;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.size()));
  for (const auto& p : store) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put<std::uint8_t>(out, static_cast<std::uint8_t>(p.kind));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(p.value.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(p.value.cols()));
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = p.value;
    out.append(reinterpret_cast<const char*>(rows.data()), sizeof(double) * static_cast<std::size_t>(rows.size()));
  }
  put<std::uint64_t>(out, fnv1a(out, out.size()));
  std::ofstream file(path, std::ios::binary);
  if (!file || !file.write(out.data(), static_cast<std::streamsize>(out.size()))) {
    throw ValidationError("cannot write checkpoint '" + path + "'");
  }
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot open checkpoint '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  const std::size_t hashed = bytes.size() < 8 ? 0 : bytes.size() - 8;
  Cursor head(bytes, bytes.size(), path);
  if (bytes.size() < 4 || std::memcmp(head.take(4, "magic"), kMagic, 4) != 0) head.fail("not a checkpoint file");

  Cursor in(bytes, hashed, path);
  in.take(4, "magic");
  const auto version = in.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    in.fail("checkpoint version " + std::to_string(version) + ", this build reads " + std::to_string(kCheckpointVersion));
  }
  const auto manifest_length = in.get<std::uint64_t>("manifest length");
  const char* manifest_text = in.take(manifest_length, "manifest");
  Checkpoint c;
  c.manifest = json::parse(manifest_text, manifest_text + manifest_length, nullptr, false);
  if (c.manifest.is_discarded() || !c.manifest.is_object()) in.fail("malformed manifest");
  const auto count = in.get<std::uint32_t>("parameter count");
  for (std::uint32_t k = 0; k < count; ++k) {
    autodiff::Parameter<double> p;
    const auto name_length = in.get<std::uint32_t>("parameter name length");
    p.name.assign(in.take(name_length, "parameter name"), name_length);
    const auto kind = in.get<std::uint8_t>("parameter kind");
    if (kind > static_cast<std::uint8_t>(autodiff::ParameterKind::Lookup)) in.fail("bad kind for '" + p.name + "'");
    p.kind = static_cast<autodiff::ParameterKind>(kind);
    const auto rows = in.get<std::uint64_t>("rows");
    const auto cols = in.get<std::uint64_t>("cols");
    if (cols != 0 && rows > (hashed - in.position()) / sizeof(double) / cols) {
      in.fail("truncated while reading '" + p.name + "'");
    }
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values(static_cast<Eigen::Index>(rows),
                                                                                  static_cast<Eigen::Index>(cols));
    const std::size_t size = sizeof(double) * rows * cols;
    std::memcpy(values.data(), in.take(size, "parameter values"), size);
    p.value = values;
    c.parameters.push_back(std::move(p));
  }
  if (in.position() != hashed) in.fail("trailing bytes after the parameters");
  if (bytes.size() < 8) in.fail("truncated before the hash");
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + hashed, 8);
  if (stored != fnv1a(bytes, hashed)) in.fail("hash mismatch (corrupt file)");
  return c;
}

void restore_parameters(autodiff::ParameterStore<double>& store, const Checkpoint& checkpoint) {
  if (static_cast<int>(checkpoint.parameters.size()) != store.size()) {
    throw ValidationError("checkpoint has " + std::to_string(checkpoint.parameters.size()) + " parameters, model has " +
                          std::to_string(store.size()));
  }
  for (const auto& p : checkpoint.parameters) {
    int id = store.find(p.name);
    if (id < 0) throw ValidationError("checkpoint parameter '" + p.name + "' is not in the model");
    const auto& target = store[id].value;
    if (target.rows() != p.value.rows() || target.cols() != p.value.cols()) {
      throw ValidationError("shape mismatch for '" + p.name + "': checkpoint " + std::to_string(p.value.rows()) + "x" +
                            std::to_string(p.value.cols()) + ", model " + std::to_string(target.rows()) + "x" +
                            std::to_string(target.cols()));
    }
    store.set_value(id, p.value);
  }
}

void save_model(const Model<double>& model, const std::string& path) {
  const ModelConfig& c = model.config();
  const ModelVocabularies& v = model.vocab();
  std::ostringstream ontology;
  write_ontology(ontology, model.ontology());
  json manifest = {
      {"kind", "model"},
      {"hyperparameters",
       {{"encoder", encoder_json(c.encoder)},
        {"embedding", c.embedding},
        {"rank", c.rank},
        {"max_span_length", c.max_span_length},
        {"joint", c.joint},
        {"cross_task", c.cross_task},
        {"top_arcs", c.top_arcs},
        {"word_dropout", c.word_dropout},
        {"l2_penalty", "lambda * ||w||^2, gradient 2 * lambda * w"}}},
      {"vocabularies", {{"tokens", tokens_json(v.tokens)}, {"labels", v.labels.names}}},
      {"deterministic_labels", v.deterministic_labels},
      {"ontology", ontology.str()},
      {"ontology_fingerprint", model.ontology().fingerprint()},
  };
  save_checkpoint(model.store(), std::move(manifest), path);
}

Loaded<Model<double>> load_model(const std::string& path, const LoadOptions& options) {
  Checkpoint c = read_checkpoint(path);
  expect_kind(c, "model", path);
  Loaded<Model<double>> out;
  try {
    const json& h = c.manifest.at("hyperparameters");
    ModelConfig config;
    config.encoder = encoder_from(h.at("encoder"));
    config.embedding = h.at("embedding");
    config.rank = h.at("rank");
    config.max_span_length = h.at("max_span_length");
    config.joint = h.at("joint");
    config.cross_task = h.at("cross_task");
    config.top_arcs = h.at("top_arcs");
    config.word_dropout = h.at("word_dropout");

    auto vocab = std::make_shared<ModelVocabularies>();
    vocab->tokens = tokens_from(c.manifest.at("vocabularies").at("tokens"));
    for (const auto& label : c.manifest.at("vocabularies").at("labels")) vocab->labels.add(label.get<std::string>());
    vocab->deterministic_labels = c.manifest.at("deterministic_labels").get<std::vector<int>>();

    std::istringstream stored_text(c.manifest.at("ontology").get<std::string>());
    Ontology ontology = read_ontology(stored_text, path + " (manifest)");
    const std::uint64_t fingerprint = c.manifest.at("ontology_fingerprint");
    if (options.ontology != nullptr && options.ontology->fingerprint() != fingerprint) {
      const std::string message = "ontology of '" + path + "' differs from the supplied ontology";
      if (!options.allow_ontology_mismatch) throw ValidationError(message + " (override to proceed)");
      out.warnings.push_back(message);
      ontology = *options.ontology;
    }
    std::mt19937_64 rng(0);
    out.value = std::make_unique<Model<double>>(config, std::move(ontology), std::move(vocab), rng);
  } catch (const json::exception& e) {
    throw ValidationError("bad manifest in '" + path + "': " + e.what());
  }
  restore_parameters(out.value->store(), c);
  return out;
}

void save_pruner(const Pruner<double>& pruner, const std::string& path) {
  const PrunerConfig& c = pruner.config();
  json manifest = {
      {"kind", "pruner"},
      {"hyperparameters",
       {{"encoder", encoder_json(c.encoder)}, {"max_span_length", c.max_span_length}, {"word_dropout", c.word_dropout}}},
      {"vocabularies", {{"tokens", tokens_json(pruner.vocab())}}},
  };
  save_checkpoint(pruner.store(), std::move(manifest), path);
}

std::unique_ptr<Pruner<double>> load_pruner(const std::string& path) {
  Checkpoint c = read_checkpoint(path);
  expect_kind(c, "pruner", path);
  std::unique_ptr<Pruner<double>> out;
  try {
    const json& h = c.manifest.at("hyperparameters");
    PrunerConfig config;
    config.encoder = encoder_from(h.at("encoder"));
    config.max_span_length = h.at("max_span_length");
    config.word_dropout = h.at("word_dropout");
    auto vocab = std::make_shared<TokenVocabularies>(tokens_from(c.manifest.at("vocabularies").at("tokens")));
    std::mt19937_64 rng(0);
    out = std::make_unique<Pruner<double>>(config, std::move(vocab), rng);
  } catch (const json::exception& e) {
    throw ValidationError("bad manifest in '" + path + "': " + e.what());
  }
  restore_parameters(out->store(), c);
  return out;
}

}  // namespace jointsem
