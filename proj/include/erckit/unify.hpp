#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "erckit/corpus.hpp"

namespace erckit {

/// The nine-label unified emotion space, in canonical order.
const std::vector<std::string>& unified_labels();

/// Benchmark dataset ids whose mapping rows are pinned by checksum.
const std::vector<std::string>& benchmark_dataset_ids();

/// The canonical mapping table, embedded so tools can materialize it
/// anywhere; byte-identical to the shipped data file.
std::string_view canonical_mapping_text();

class LabelMapping {
 public:
  using Key = std::pair<std::string, std::string>;  // (dataset_id, source)

  /// Loads dataset_id<TAB>source_label<TAB>unified_label rows. Rows for the
  /// three benchmark datasets must reproduce the canonical table; the loader
  /// verifies them against an embedded checksum so accidental edits fail
  /// loudly. Rows for additional datasets are free-form.
  static LabelMapping load(const std::filesystem::path& path);
  static LabelMapping parse(std::istream& in, std::string_view origin);

  void save(const std::filesystem::path& path) const;

  /// Table lookup; UnknownLabel when the pair is absent (including N/A cells).
  const std::string& map_emotion(const std::string& dataset_id,
                                 const std::string& source_label) const;
  bool has_row(const std::string& dataset_id,
               const std::string& source_label) const;

  const std::map<Key, std::string>& rows() const { return rows_; }
  const std::vector<std::string>& unified_set() const;

  /// Manifest labels with no mapping row (surfaced as warnings, not errors).
  std::vector<std::string> unmapped_labels(const DatasetManifest& m) const;

 private:
  std::map<Key, std::string> rows_;
};

struct SpeakerRegistry {
  struct Range {
    int start = 0;   // first id, 1-based
    int length = 0;  // number of speakers
  };

  std::vector<std::pair<std::string, Range>> ranges;  // dataset order
  std::map<std::pair<std::string, std::string>, int> ids;  // (dataset, name)

  int total() const;
  int id_of(const std::string& dataset_id, const std::string& name) const;

  void save(const std::filesystem::path& path) const;
  static SpeakerRegistry load(const std::filesystem::path& path);

  /// Ordered list of every original speaker name across all datasets.
  std::vector<std::string> all_names() const;
};

/// Assigns 1..n1 to the first manifest's speakers in manifest order, then
/// n1+1..n1+n2 to the second, and so on.
SpeakerRegistry build_registry(const std::vector<DatasetManifest>& manifests);

/// Rebuilds the corpora into one corpus over the unified label space, with
/// speakers replaced by their global ids. Conversations keep their source
/// dataset id so runs can still be scored per benchmark.
Corpus unify_corpus(const std::vector<Corpus>& corpora,
                    const LabelMapping& mapping,
                    const SpeakerRegistry& registry);

inline constexpr std::string_view kUnifiedDatasetId = "UIME";

}  // namespace erckit
