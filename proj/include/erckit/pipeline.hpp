#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erckit/backend.hpp"
#include "erckit/eval.hpp"
#include "erckit/mixing.hpp"
#include "erckit/prompt.hpp"
#include "erckit/retrieval.hpp"
#include "erckit/unify.hpp"

namespace erckit {

struct EmbedderConfig {
  std::string kind = "hashed_ngram";  // hashed_ngram | vector_file | http
  int dim = 256;
  std::string path;      // vector_file
  std::string endpoint;  // http
};

/// One self-describing run configuration; the seed is mandatory, commands
/// never draw implicit entropy. Serialized snapshots and the derived config
/// hash stamp every output file.
struct RunConfig {
  std::uint64_t seed = 0;
  int window = 12;
  double alpha = 0.1;
  Pairing train_pairing = Pairing::SameLabel;
  Pairing infer_pairing = Pairing::AllLabels;
  EmbedderConfig embedder;
  BackendConfig backend;
  std::string mix_strategy = "ratio";
  std::string mix_fraction = "1";
  std::string mix_single_dataset;
  double unparseable_threshold = 1.0;

  static RunConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::string canonical_json() const;
  std::string hash() const;  // 16 hex digits over the canonical form
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

/// Writes the config snapshot into `out_dir` and returns the config hash.
std::string snapshot_config(const RunConfig& config,
                            const std::filesystem::path& out_dir);

// Run-layer operations shared by the CLI and the acceptance suite. Every
// function is deterministic given its inputs plus the config seed.

Corpus load_corpus(const std::filesystem::path& corpus_path,
                   const std::filesystem::path& manifest_path);

struct UnifyInputs {
  std::vector<std::filesystem::path> corpus_paths;
  std::vector<std::filesystem::path> manifest_paths;
  std::filesystem::path mapping_path;
};

struct UnifyOutputs {
  Corpus unified;
  SpeakerRegistry registry;
};

UnifyOutputs run_unify(const UnifyInputs& inputs);

RetrievalIndex run_build_index(const Corpus& corpus, const RunConfig& config,
                               std::span<const std::string> strip_names);

struct ScaleGridRow {
  Fraction fraction;
  std::map<std::string, long> total_counts;   // per source dataset
  std::map<std::string, long> ratio_counts;
  std::map<std::string, long> single_counts;  // dataset -> size
};

struct ScaleGrid {
  std::vector<ScaleGridRow> rows;
};

/// Table-shaped scaling grid: total and ratio mixing plus per-dataset single
/// runs at every fraction; subset manifests land in `out_dir`/subsets.
ScaleGrid run_scale_experiment(const Corpus& unified, const RunConfig& config,
                               const std::filesystem::path& out_dir);

struct SweepRow {
  std::string key;          // "w=12", "alpha=0.1", "train=same_label,infer=all_labels"
  double weighted_f1 = 0.0;
  long samples = 0;
};

std::vector<SweepRow> run_window_sweep(const Corpus& corpus,
                                       const RunConfig& config,
                                       const std::vector<int>& windows,
                                       const std::filesystem::path& out_dir);
std::vector<SweepRow> run_alpha_sweep(const Corpus& corpus,
                                      const RunConfig& config,
                                      const std::vector<double>& alphas,
                                      const std::filesystem::path& out_dir);
std::vector<SweepRow> run_pairing_sweep(const Corpus& corpus,
                                        const RunConfig& config,
                                        const std::filesystem::path& out_dir);

/// ingest -> index -> inference prompts -> generate -> parse -> score, with
/// every artifact written under `out_dir`.
EvalReport run_end_to_end(const Corpus& corpus, const RunConfig& config,
                          const std::filesystem::path& out_dir,
                          std::span<const std::string> strip_names = {});

void save_sweep_rows(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path,
                     std::string_view config_hash);

}  // namespace erckit
