#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "erckit/corpus.hpp"

namespace erckit {

// Synthetic benchmark fixtures. Conversation/utterance counts per split match
// the published statistics of the three standard ERC corpora exactly; texts,
// speakers and label assignments are generated deterministically.

struct FixturePaths {
  std::filesystem::path corpus;
  std::filesystem::path manifest;
};

/// Writes <dir>/<name>.jsonl and <dir>/<name>.manifest.json for IEMOCAP,
/// MELD and EmoryNLP. Fully deterministic; re-runs are byte-identical.
std::vector<FixturePaths> write_benchmark_fixtures(
    const std::filesystem::path& dir);

/// Small standalone dataset over the unified 9-label space ("uimedemo"):
/// 90 train utterances for index building and a 60-utterance test split.
/// Texts carry planted emotion keywords so rule-based mock runs produce a
/// stable, non-trivial score.
FixturePaths write_rule_eval_fixture(const std::filesystem::path& dir);

/// In-memory builders used by the writers (and handy in tests).
Corpus make_benchmark_fixture(const std::string& dataset_id);
Corpus make_rule_eval_fixture();

}  // namespace erckit
