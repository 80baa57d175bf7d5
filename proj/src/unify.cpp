#include "erckit/unify.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "erckit/error.hpp"
#include "erckit/hash.hpp"
#include "erckit/records.hpp"

namespace erckit {

using nlohmann::json;

const std::vector<std::string>& unified_labels() {
  static const std::vector<std::string> labels = {
      "joyful", "sad",  "neutral",  "mad",     "excited",
      "powerful", "fear", "peaceful", "disgust"};
  return labels;
}

const std::vector<std::string>& benchmark_dataset_ids() {
  static const std::vector<std::string> ids = {"iemocap", "meld", "emorynlp"};
  return ids;
}

std::string_view canonical_mapping_text() {
  static constexpr std::string_view text =
      "# dataset_id\tsource_label\tunified_label\n"
      "# Canonical feeling-wheel mapping for the three bundled benchmark "
      "layouts.\n"
      "# Absent pairs (e.g. meld/excited) are deliberate: those cells have "
      "no\n"
      "# counterpart in the unified space and must stay unmapped.\n"
      "iemocap\thappy\tjoyful\n"
      "iemocap\tsad\tsad\n"
      "iemocap\tneutral\tneutral\n"
      "iemocap\tangry\tmad\n"
      "iemocap\texcited\texcited\n"
      "iemocap\tscared\tfear\n"
      "meld\tjoyful\tjoyful\n"
      "meld\tsad\tsad\n"
      "meld\tneutral\tneutral\n"
      "meld\tangry\tmad\n"
      "meld\tsurprise\tpowerful\n"
      "meld\tfear\tfear\n"
      "meld\tdisgust\tdisgust\n"
      "emorynlp\tjoyful\tjoyful\n"
      "emorynlp\tsad\tsad\n"
      "emorynlp\tneutral\tneutral\n"
      "emorynlp\tmad\tmad\n"
      "emorynlp\tpowerful\tpowerful\n"
      "emorynlp\tfrustrated\tfear\n"
      "emorynlp\tpeaceful\tpeaceful\n";
  return text;
}

namespace {

// FNV-1a over the benchmark rows in map order; pins the canonical table.
constexpr std::uint64_t kBenchmarkRowChecksum = 0xf8c0f03743deeb49ull;

bool is_benchmark(const std::string& dataset_id) {
  const auto& ids = benchmark_dataset_ids();
  return std::find(ids.begin(), ids.end(), dataset_id) != ids.end();
}

}  // namespace

LabelMapping LabelMapping::parse(std::istream& in, std::string_view origin) {
  LabelMapping mapping;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || is_comment_line(line)) continue;
    std::vector<std::string> fields = split_on(line, '\t');
    std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (fields.size() != 3) {
      raise(ErrorKind::BadMapping,
            where + ": expected dataset<TAB>source<TAB>unified, got " +
                std::to_string(fields.size()) + " fields");
    }
    std::string dataset = trim(fields[0]);
    std::string source = trim(fields[1]);
    std::string unified = trim(fields[2]);
    if (dataset.empty() || source.empty() || unified.empty()) {
      raise(ErrorKind::BadMapping, where + ": empty field");
    }
    const auto& targets = unified_labels();
    if (std::find(targets.begin(), targets.end(), unified) == targets.end()) {
      raise(ErrorKind::BadMapping,
            where + ": '" + unified + "' is not a unified label");
    }
    if (!mapping.rows_.emplace(Key{dataset, source}, unified).second) {
      raise(ErrorKind::BadMapping,
            where + ": duplicate row for (" + dataset + ", " + source + ")");
    }
  }

  std::string benchmark_blob;
  for (const auto& [key, unified] : mapping.rows_) {
    if (!is_benchmark(key.first)) continue;
    benchmark_blob += key.first;
    benchmark_blob += '\t';
    benchmark_blob += key.second;
    benchmark_blob += '\t';
    benchmark_blob += unified;
    benchmark_blob += '\n';
  }
  if (!benchmark_blob.empty() &&
      fnv1a64(benchmark_blob) != kBenchmarkRowChecksum) {
    raise(ErrorKind::BadMapping,
          std::string(origin) +
              ": benchmark rows do not match the canonical table");
  }
  return mapping;
}

LabelMapping LabelMapping::load(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse(in, path.string());
}

void LabelMapping::save(const std::filesystem::path& path) const {
  std::ofstream out = open_output(path);
  out << "# dataset_id\tsource_label\tunified_label\n";
  for (const auto& [key, unified] : rows_) {
    out << key.first << '\t' << key.second << '\t' << unified << '\n';
  }
}

const std::string& LabelMapping::map_emotion(
    const std::string& dataset_id, const std::string& source_label) const {
  auto it = rows_.find(Key{dataset_id, source_label});
  if (it == rows_.end()) {
    raise(ErrorKind::UnknownLabel,
          "no unified mapping for (" + dataset_id + ", " + source_label + ")");
  }
  return it->second;
}

bool LabelMapping::has_row(const std::string& dataset_id,
                           const std::string& source_label) const {
  return rows_.count(Key{dataset_id, source_label}) > 0;
}

const std::vector<std::string>& LabelMapping::unified_set() const {
  return unified_labels();
}

std::vector<std::string> LabelMapping::unmapped_labels(
    const DatasetManifest& m) const {
  std::vector<std::string> out;
  for (const auto& label : m.label_set) {
    if (!has_row(m.dataset_id, label)) out.push_back(label);
  }
  return out;
}

int SpeakerRegistry::total() const {
  int n = 0;
  for (const auto& [id, range] : ranges) n += range.length;
  return n;
}

int SpeakerRegistry::id_of(const std::string& dataset_id,
                           const std::string& name) const {
  auto it = ids.find({dataset_id, name});
  if (it == ids.end()) {
    raise(ErrorKind::BadManifest,
          "speaker '" + name + "' of dataset '" + dataset_id +
              "' is not in the registry");
  }
  return it->second;
}

std::vector<std::string> SpeakerRegistry::all_names() const {
  std::vector<std::string> names(static_cast<std::size_t>(total()));
  for (const auto& [key, id] : ids) {
    names[static_cast<std::size_t>(id - 1)] = key.second;
  }
  return names;
}

void SpeakerRegistry::save(const std::filesystem::path& path) const {
  json doc;
  doc["datasets"] = json::array();
  std::vector<std::string> names = all_names();
  for (const auto& [dataset_id, range] : ranges) {
    json entry;
    entry["dataset_id"] = dataset_id;
    entry["start"] = range.start;
    json speakers = json::array();
    for (int i = 0; i < range.length; ++i) {
      speakers.push_back(names[static_cast<std::size_t>(range.start - 1 + i)]);
    }
    entry["speakers"] = speakers;
    doc["datasets"].push_back(entry);
  }
  write_text_file(path, doc.dump(2) + "\n");
}

SpeakerRegistry SpeakerRegistry::load(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    raise(ErrorKind::BadManifest, path.string() + ": " + e.what());
  }
  SpeakerRegistry registry;
  try {
    int next = 1;
    for (const auto& entry : doc.at("datasets")) {
      std::string dataset_id = entry.at("dataset_id").get<std::string>();
      auto speakers = entry.at("speakers").get<std::vector<std::string>>();
      int start = entry.value("start", next);
      if (start != next) {
        raise(ErrorKind::BadManifest,
              path.string() + ": dataset '" + dataset_id +
                  "' starts at id " + std::to_string(start) + ", expected " +
                  std::to_string(next));
      }
      Range range{next, static_cast<int>(speakers.size())};
      registry.ranges.emplace_back(dataset_id, range);
      for (const auto& name : speakers) {
        registry.ids[{dataset_id, name}] = next++;
      }
    }
  } catch (const json::exception& e) {
    raise(ErrorKind::BadManifest, path.string() + ": " + e.what());
  }
  return registry;
}

SpeakerRegistry build_registry(const std::vector<DatasetManifest>& manifests) {
  SpeakerRegistry registry;
  std::set<std::string> seen;
  int next = 1;
  for (const auto& m : manifests) {
    m.validate();
    if (!seen.insert(m.dataset_id).second) {
      raise(ErrorKind::BadManifest,
            "dataset '" + m.dataset_id + "' appears twice");
    }
    if (m.speaker_set.empty()) {
      raise(ErrorKind::BadManifest,
            "dataset '" + m.dataset_id +
                "' declares no speakers; global ids need the full roster");
    }
    SpeakerRegistry::Range range{next,
                                 static_cast<int>(m.speaker_set.size())};
    registry.ranges.emplace_back(m.dataset_id, range);
    for (const auto& name : m.speaker_set) {
      registry.ids[{m.dataset_id, name}] = next++;
    }
  }
  return registry;
}

Corpus unify_corpus(const std::vector<Corpus>& corpora,
                    const LabelMapping& mapping,
                    const SpeakerRegistry& registry) {
  Corpus unified;
  unified.manifest.dataset_id = std::string(kUnifiedDatasetId);
  unified.manifest.label_set = unified_labels();
  for (int id = 1; id <= registry.total(); ++id) {
    unified.manifest.speaker_set.push_back(std::to_string(id));
  }

  std::set<std::string> seen;
  for (const auto& corpus : corpora) {
    const std::string& dataset = corpus.manifest.dataset_id;
    if (!seen.insert(dataset).second) {
      raise(ErrorKind::BadManifest, "dataset '" + dataset + "' appears twice");
    }
    unified.manifest.members.push_back(dataset);
    for (const auto& label : mapping.unmapped_labels(corpus.manifest)) {
      unified.warnings.push_back("dataset '" + dataset + "': label '" + label +
                                 "' has no unified mapping");
    }
    for (const auto& conv : corpus.conversations) {
      Conversation out;
      out.id = conv.id;
      out.dataset_id = conv.dataset_id;
      out.split = conv.split;
      out.utterances.reserve(conv.utterances.size());
      for (const auto& u : conv.utterances) {
        Utterance mapped = u;
        mapped.emotion = mapping.map_emotion(conv.dataset_id, u.emotion);
        mapped.speaker = std::to_string(registry.id_of(conv.dataset_id,
                                                       u.speaker));
        out.utterances.push_back(std::move(mapped));
      }
      unified.conversations.push_back(std::move(out));
    }
  }

  for (const auto& [split_name, split_stats] : stats(unified)) {
    unified.manifest.declared_splits[split_name] =
        SplitSizes{split_stats.conversations, split_stats.utterances};
  }
  return unified;
}

}  // namespace erckit
