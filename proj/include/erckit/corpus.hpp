#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace erckit {

/// One dialogue turn. `index` is the 0-based position inside its
/// conversation; `emotion` must belong to the owning manifest's label set.
struct Utterance {
  std::string conv_id;
  int index = 0;
  std::string speaker;
  std::string text;
  std::string emotion;

  bool operator==(const Utterance&) const = default;
};

struct Conversation {
  std::string id;
  std::string dataset_id;  // source dataset; kept distinct from the manifest
                           // id so unified corpora stay addressable per benchmark
  std::string split;       // train | val | test
  std::vector<Utterance> utterances;

  int distinct_speakers() const;
  bool operator==(const Conversation&) const = default;
};

struct SplitSizes {
  long conversations = -1;
  long utterances = -1;
};

struct DatasetManifest {
  std::string dataset_id;
  std::vector<std::string> label_set;    // ordered, no duplicates
  std::vector<std::string> speaker_set;  // ordered, no duplicates
  std::vector<std::string> members;      // dataset ids legal in records;
                                         // defaults to {dataset_id}
  std::map<std::string, SplitSizes> declared_splits;  // optional expectations

  void validate() const;
  bool has_label(std::string_view label) const;
  bool has_member(std::string_view dataset) const;

  static DatasetManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

struct Corpus {
  DatasetManifest manifest;
  std::vector<Conversation> conversations;  // input order, grouped by id
  std::vector<std::string> warnings;

  std::vector<const Conversation*> split(std::string_view name) const;
  long utterance_count(std::string_view split_name) const;
  bool operator==(const Corpus& other) const {
    return manifest.dataset_id == other.manifest.dataset_id &&
           conversations == other.conversations;
  }
};

Corpus ingest(const std::filesystem::path& path, DatasetManifest manifest);
Corpus parse_corpus(std::istream& in, DatasetManifest manifest);

/// Writes one record per line; a leading `# ` comment carries provenance
/// when `config_hash` is non-empty. Records round-trip through ingest.
void serialize_corpus(const Corpus& corpus, std::ostream& out,
                      std::string_view config_hash = {});
void save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                 std::string_view config_hash = {});

struct SplitStats {
  long conversations = 0;
  long utterances = 0;
  std::map<std::string, long> class_counts;
  double avg_utt = 0.0;  // utterances / conversations, 2 decimals
};

std::map<std::string, SplitStats> stats(const Corpus& corpus);

bool is_valid_split(std::string_view name);

}  // namespace erckit
