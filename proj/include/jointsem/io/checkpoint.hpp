#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "jointsem/autodiff/parameters.hpp"
#include "jointsem/model/model.hpp"
#include "jointsem/pruning/pruner.hpp"

namespace jointsem {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout (little-endian):
///   "JSCK" | u32 version | u64 manifest length | manifest (JSON text)
///   | u32 parameter count | per parameter: u32 name length, name, u8 kind,
///     u64 rows, u64 cols, rows·cols f64 (row-major)
///   | u64 FNV-1a hash of every preceding byte.
/// The manifest always has "kind" ("model" or "pruner") and "version".
struct Checkpoint {
  nlohmann::json manifest;
  std::vector<autodiff::Parameter<double>> parameters;
};

void save_checkpoint(const autodiff::ParameterStore<double>& store, nlohmann::json manifest,
                     const std::string& path);
/// Throws ParseError on a bad magic, version, hash or a truncated file; nothing
/// is returned unless the whole file checks out.
Checkpoint read_checkpoint(const std::string& path);
/// Overwrites every store parameter from the checkpoint. Names and shapes must
/// match one to one.
void restore_parameters(autodiff::ParameterStore<double>& store, const Checkpoint& checkpoint);

struct LoadOptions {
  /// When set, the stored ontology fingerprint must match it.
  const Ontology* ontology = nullptr;
  /// Turns an ontology mismatch into a warning; the supplied ontology is used.
  bool allow_ontology_mismatch = false;
};

template <typename T>
struct Loaded {
  std::unique_ptr<T> value;
  std::vector<std::string> warnings;
};

void save_model(const Model<double>& model, const std::string& path);
Loaded<Model<double>> load_model(const std::string& path, const LoadOptions& options = {});

void save_pruner(const Pruner<double>& pruner, const std::string& path);
std::unique_ptr<Pruner<double>> load_pruner(const std::string& path);

}  // namespace jointsem
