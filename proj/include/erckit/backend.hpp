#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erckit/corpus.hpp"
#include "erckit/mixing.hpp"
#include "erckit/prompt.hpp"
#include "erckit/retrieval.hpp"

namespace erckit {

enum class BackendKind { MockEcho, MockRule, Http };

std::string_view to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view name);

struct BackendConfig {
  BackendKind kind = BackendKind::MockEcho;
  std::string endpoint;      // http only
  int max_new_tokens = 16;
  double temperature = 0.0;  // greedy decoding is the contractual mode
  int timeout_ms = 30000;
  int concurrency = 1;       // bounded in-flight requests
};

/// One completion. mock_echo answers the sample's gold label; mock_rule runs
/// the shipped keyword lexicon over the prompt; http posts
/// {prompt, max_new_tokens, temperature} and returns the service's text.
std::string generate(const PromptSample& sample, const BackendConfig& config);

/// Runs `generate` over all samples with at most `config.concurrency`
/// in-flight requests. Results are joined in sample order. `on_result` fires
/// in order too, so callers can checkpoint; a transport failure surfaces
/// after every earlier result has been delivered.
std::vector<std::string> generate_all(
    std::span<const PromptSample> samples, const BackendConfig& config,
    const std::function<void(std::size_t, const std::string&)>& on_result = {});

/// The mock_rule lexicon, in match order: first keyword found in the scanned
/// segment wins; no match falls back to "neutral".
std::span<const std::pair<std::string_view, std::string_view>> rule_lexicon();
std::string rule_completion(std::string_view prompt_text);

// ---- two-stage training export ----

/// Stage 1: one speaker-identification sample per utterance, weight 1.0,
/// seeded shuffle.
std::vector<PromptSample> export_stage1(const Corpus& corpus,
                                        std::uint64_t seed);

/// Stage 2: per utterance one main sample (weight 1.0, demonstration
/// retrieved under `train_pairing`) plus, from the second turn on, one
/// emotion-impact sample (weight alpha). Interleaved by seeded shuffle.
std::vector<PromptSample> export_stage2(const Corpus& corpus, WindowSpec spec,
                                        const RetrievalIndex& index,
                                        const Embedder& embedder, double alpha,
                                        std::uint64_t seed,
                                        Pairing train_pairing = Pairing::SameLabel);

/// Keeps only the samples whose utterance address the subset selected;
/// relative order is preserved.
std::vector<PromptSample> apply_subset(std::vector<PromptSample> samples,
                                       const Subset& subset);

/// Main-task samples for one split, demonstrations retrieved under
/// `pairing` (inference default: all labels). Pass a null index to skip
/// demonstrations entirely.
std::vector<PromptSample> build_inference_samples(
    const Corpus& corpus, std::string_view split, WindowSpec spec,
    const RetrievalIndex* index, const Embedder* embedder,
    Pairing pairing = Pairing::AllLabels);

// ---- sample file io (line-delimited records) ----

void write_samples(std::span<const PromptSample> samples, std::ostream& out,
                   std::string_view config_hash = {});
void save_samples(std::span<const PromptSample> samples,
                  const std::filesystem::path& path,
                  std::string_view config_hash = {});
std::vector<PromptSample> read_samples(std::istream& in);
std::vector<PromptSample> load_samples(const std::filesystem::path& path);

}  // namespace erckit
