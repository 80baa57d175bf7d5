#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "erckit/backend.hpp"
#include "erckit/prompt.hpp"

namespace erckit {

struct ClassScore {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

struct EvalReport {
  std::vector<ClassScore> per_class;  // label_set order
  double weighted_f1 = 0.0;
  long total = 0;
  long unparseable = 0;
  // UIME runs: one sub-report per source dataset, partitioning the test set.
  std::vector<std::pair<std::string, EvalReport>> per_dataset;
};

/// Free text -> label. Normalization: first line, trimmed, surrounding
/// punctuation stripped, lowercased. Exact match wins; otherwise a unique
/// longest label substring; otherwise empty (unparseable).
std::optional<std::string> parse_prediction(
    std::string_view completion, std::span<const std::string> label_set);

/// Support-weighted F1 over the label set. An unparseable prediction counts
/// as a reserved never-correct class: a false negative for its gold label
/// and a false positive for no real label.
EvalReport weighted_f1(std::span<const std::string> gold,
                       std::span<const std::optional<std::string>> predictions,
                       std::span<const std::string> label_set);

/// Parse + score completions that are already in hand (offline scoring).
EvalReport score_completions(std::span<const PromptSample> samples,
                             std::span<const std::string> completions,
                             std::span<const std::string> label_set,
                             bool per_dataset = true);

struct EvaluateOptions {
  std::filesystem::path checkpoint;  // predictions flushed here as they land
  bool per_dataset = true;
  std::string config_hash;
};

/// generate -> parse -> score. Sample metas supply the gold labels and the
/// per-dataset breakdown. A transport failure still leaves every completed
/// prediction in the checkpoint file.
EvalReport evaluate_run(std::span<const PromptSample> samples,
                        const BackendConfig& backend,
                        std::span<const std::string> label_set,
                        const EvaluateOptions& options = {});

void write_report_text(const EvalReport& report, std::ostream& out);
void save_report_json(const EvalReport& report,
                      const std::filesystem::path& path,
                      std::string_view config_hash = {});

}  // namespace erckit
