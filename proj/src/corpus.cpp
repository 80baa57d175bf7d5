#include "erckit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "erckit/error.hpp"
#include "erckit/records.hpp"

namespace erckit {

using nlohmann::json;

bool is_valid_split(std::string_view name) {
  return name == "train" || name == "val" || name == "test";
}

int Conversation::distinct_speakers() const {
  std::set<std::string_view> names;
  for (const auto& u : utterances) names.insert(u.speaker);
  return static_cast<int>(names.size());
}

void DatasetManifest::validate() const {
  if (dataset_id.empty()) raise(ErrorKind::BadManifest, "empty dataset_id");
  if (label_set.empty()) {
    raise(ErrorKind::BadManifest, dataset_id + ": empty label set");
  }
  std::set<std::string_view> seen;
  for (const auto& label : label_set) {
    if (!seen.insert(label).second) {
      raise(ErrorKind::BadManifest, dataset_id + ": duplicate label " + label);
    }
  }
  seen.clear();
  for (const auto& name : speaker_set) {
    if (!seen.insert(name).second) {
      raise(ErrorKind::BadManifest, dataset_id + ": duplicate speaker " + name);
    }
  }
}

bool DatasetManifest::has_label(std::string_view label) const {
  return std::find(label_set.begin(), label_set.end(), label) !=
         label_set.end();
}

bool DatasetManifest::has_member(std::string_view dataset) const {
  if (members.empty()) return dataset == dataset_id;
  return std::find(members.begin(), members.end(), dataset) != members.end();
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    raise(ErrorKind::BadManifest, path.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    m.dataset_id = doc.at("dataset_id").get<std::string>();
    m.label_set = doc.at("labels").get<std::vector<std::string>>();
    m.speaker_set = doc.value("speakers", std::vector<std::string>{});
    m.members = doc.value("members", std::vector<std::string>{});
    if (doc.contains("splits")) {
      for (auto& [name, sizes] : doc.at("splits").items()) {
        SplitSizes s;
        s.conversations = sizes.value("conversations", -1);
        s.utterances = sizes.value("utterances", -1);
        m.declared_splits[name] = s;
      }
    }
  } catch (const json::exception& e) {
    raise(ErrorKind::BadManifest, path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

void DatasetManifest::save(const std::filesystem::path& path) const {
  json doc;
  doc["dataset_id"] = dataset_id;
  doc["labels"] = label_set;
  doc["speakers"] = speaker_set;
  if (!members.empty()) doc["members"] = members;
  if (!declared_splits.empty()) {
    json splits = json::object();
    for (const auto& [name, sizes] : declared_splits) {
      splits[name] = {{"conversations", sizes.conversations},
                      {"utterances", sizes.utterances}};
    }
    doc["splits"] = splits;
  }
  write_text_file(path, doc.dump(2) + "\n");
}

std::vector<const Conversation*> Corpus::split(std::string_view name) const {
  std::vector<const Conversation*> out;
  for (const auto& conv : conversations) {
    if (conv.split == name) out.push_back(&conv);
  }
  return out;
}

long Corpus::utterance_count(std::string_view split_name) const {
  long n = 0;
  for (const auto& conv : conversations) {
    if (conv.split == split_name) {
      n += static_cast<long>(conv.utterances.size());
    }
  }
  return n;
}

namespace {

struct ConvKey {
  std::string dataset;
  std::string conv_id;
  bool operator==(const ConvKey&) const = default;
};

struct ConvKeyHash {
  std::size_t operator()(const ConvKey& k) const {
    return std::hash<std::string>()(k.dataset) * 31 +
           std::hash<std::string>()(k.conv_id);
  }
};

std::string field_string(const json& record, const char* name, long line_no) {
  if (!record.contains(name) || !record[name].is_string()) {
    raise(ErrorKind::MalformedLine,
          "line " + std::to_string(line_no) + ": missing string field '" +
              name + "'");
  }
  return record[name].get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::istream& in, DatasetManifest manifest) {
  manifest.validate();
  Corpus corpus;
  corpus.manifest = std::move(manifest);

  std::unordered_map<ConvKey, std::size_t, ConvKeyHash> by_key;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || is_comment_line(line)) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": " + e.what());
    }
    std::string dataset = field_string(record, "dataset", line_no);
    std::string conv_id = field_string(record, "conv_id", line_no);
    std::string split = field_string(record, "split", line_no);
    std::string speaker = field_string(record, "speaker", line_no);
    std::string text = field_string(record, "text", line_no);
    std::string emotion = field_string(record, "emotion", line_no);
    if (!record.contains("index") || !record["index"].is_number_integer()) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": missing integer 'index'");
    }
    int index = record["index"].get<int>();

    if (!corpus.manifest.has_member(dataset)) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": dataset '" + dataset +
                "' not declared by manifest '" + corpus.manifest.dataset_id +
                "'");
    }
    if (!is_valid_split(split)) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": bad split '" + split + "'");
    }
    if (trim(text).empty()) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": empty text");
    }
    if (!corpus.manifest.has_label(emotion)) {
      raise(ErrorKind::UnknownLabel,
            "line " + std::to_string(line_no) + ": emotion '" + emotion +
                "' not in the manifest label set");
    }

    ConvKey key{dataset, conv_id};
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      Conversation conv;
      conv.id = conv_id;
      conv.dataset_id = dataset;
      conv.split = split;
      corpus.conversations.push_back(std::move(conv));
      it = by_key.emplace(key, corpus.conversations.size() - 1).first;
    }
    Conversation& conv = corpus.conversations[it->second];
    if (conv.split != split) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": conversation '" + conv_id +
                "' spans splits '" + conv.split + "' and '" + split + "'");
    }
    int expected = static_cast<int>(conv.utterances.size());
    if (index < expected) {
      raise(ErrorKind::DuplicateUtterance,
            "line " + std::to_string(line_no) + ": (" + conv_id + ", " +
                std::to_string(index) + ") seen twice");
    }
    if (index != expected) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": conversation '" + conv_id +
                "' expects index " + std::to_string(expected) + ", got " +
                std::to_string(index));
    }
    corpus.conversations[it->second].utterances.push_back(
        Utterance{conv_id, index, std::move(speaker), std::move(text),
                  std::move(emotion)});
  }

  for (const auto& conv : corpus.conversations) {
    if (conv.utterances.empty()) continue;
    if (conv.distinct_speakers() < 2) {
      corpus.warnings.push_back("conversation '" + conv.id +
                                "' has a single speaker");
    }
  }
  for (const auto& [name, declared] : corpus.manifest.declared_splits) {
    auto convs = corpus.split(name);
    long utts = corpus.utterance_count(name);
    if (declared.conversations >= 0 &&
        declared.conversations != static_cast<long>(convs.size())) {
      corpus.warnings.push_back(
          "split '" + name + "': manifest declares " +
          std::to_string(declared.conversations) + " conversations, found " +
          std::to_string(convs.size()));
    }
    if (declared.utterances >= 0 && declared.utterances != utts) {
      corpus.warnings.push_back("split '" + name + "': manifest declares " +
                                std::to_string(declared.utterances) +
                                " utterances, found " + std::to_string(utts));
    }
  }
  return corpus;
}

Corpus ingest(const std::filesystem::path& path, DatasetManifest manifest) {
  std::ifstream in = open_input(path);
  return parse_corpus(in, std::move(manifest));
}

void serialize_corpus(const Corpus& corpus, std::ostream& out,
                      std::string_view config_hash) {
  if (!config_hash.empty()) {
    out << provenance_header("corpus", config_hash);
  }
  for (const auto& conv : corpus.conversations) {
    for (const auto& u : conv.utterances) {
      json record{{"dataset", conv.dataset_id}, {"conv_id", conv.id},
                  {"split", conv.split},        {"index", u.index},
                  {"speaker", u.speaker},       {"text", u.text},
                  {"emotion", u.emotion}};
      out << record.dump() << "\n";
    }
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                 std::string_view config_hash) {
  std::ofstream out = open_output(path);
  serialize_corpus(corpus, out, config_hash);
}

std::map<std::string, SplitStats> stats(const Corpus& corpus) {
  std::map<std::string, SplitStats> by_split;
  for (const auto& conv : corpus.conversations) {
    SplitStats& s = by_split[conv.split];
    s.conversations += 1;
    s.utterances += static_cast<long>(conv.utterances.size());
    for (const auto& u : conv.utterances) s.class_counts[u.emotion] += 1;
  }
  for (auto& [name, s] : by_split) {
    if (s.conversations > 0) {
      double avg = static_cast<double>(s.utterances) /
                   static_cast<double>(s.conversations);
      s.avg_utt = std::round(avg * 100.0) / 100.0;
    }
  }
  return by_split;
}

}  // namespace erckit
