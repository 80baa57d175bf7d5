#include "erckit/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "erckit/error.hpp"
#include "erckit/hash.hpp"
#include "erckit/records.hpp"
#include "erckit/rng.hpp"

namespace erckit {

using nlohmann::json;

namespace {

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current += static_cast<char>(
          std::tolower(static_cast<unsigned char>(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

HashedNgramEmbedder::HashedNgramEmbedder(int dim) : dim_(dim) {
  if (dim < 1) raise(ErrorKind::BadConfig, "embedding dim must be positive");
}

std::string HashedNgramEmbedder::id() const {
  return "hashed_ngram/" + std::to_string(dim_);
}

std::vector<float> HashedNgramEmbedder::embed(std::string_view text) const {
  std::vector<float> v(static_cast<std::size_t>(dim_), 0.0f);
  std::vector<std::string> tokens = tokenize(text);

  auto add = [&](const std::string& gram) {
    std::uint64_t h = fnv1a64(gram);
    std::size_t bucket =
        static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim_));
    float sign = (h >> 63) ? -1.0f : 1.0f;
    v[bucket] += sign;
  };
  for (const auto& tok : tokens) add("u:" + tok);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    add("b:" + tokens[i] + ":" + tokens[i + 1]);
  }

  bool all_zero = true;
  for (float x : v) {
    if (x != 0.0f) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) {
    v[0] = 1.0f;
    return v;
  }
  l2_normalize(v);
  return v;
}

VectorFileEmbedder VectorFileEmbedder::load(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  VectorFileEmbedder embedder;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || is_comment_line(line)) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!header_seen) {
      embedder.dim_ = doc.value("dim", 0);
      embedder.id_ = doc.value("id", std::string("vector_file"));
      if (embedder.dim_ < 1) {
        raise(ErrorKind::MalformedLine,
              path.string() + ": header must declare a positive dim");
      }
      header_seen = true;
      continue;
    }
    std::string key;
    std::vector<float> vec;
    try {
      key = doc.at("key").get<std::string>();
      vec = doc.at("vector").get<std::vector<float>>();
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (static_cast<int>(vec.size()) != embedder.dim_) {
      raise(ErrorKind::LengthMismatch,
            path.string() + ":" + std::to_string(line_no) + ": vector has " +
                std::to_string(vec.size()) + " entries, header says " +
                std::to_string(embedder.dim_));
    }
    embedder.vectors_[key] = std::move(vec);
  }
  if (!header_seen) {
    raise(ErrorKind::MalformedLine,
          path.string() + ": missing {\"dim\": ..., \"id\": ...} header line");
  }
  return embedder;
}

std::vector<float> VectorFileEmbedder::embed(std::string_view text) const {
  auto it = vectors_.find(text_key(text));
  if (it == vectors_.end()) {
    raise(ErrorKind::MissingVector,
          "no stored vector for key " + text_key(text));
  }
  return it->second;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, int dim, int timeout_ms)
    : endpoint_(std::move(endpoint)), dim_(dim), timeout_ms_(timeout_ms) {
  if (dim_ < 1) raise(ErrorKind::BadConfig, "embedding dim must be positive");
}

std::string HttpEmbedder::id() const {
  return "http/" + std::to_string(dim_) + "/" + endpoint_;
}

namespace {

struct SplitUrl {
  std::string base;
  std::string path;
};

SplitUrl split_url(const std::string& endpoint) {
  auto scheme = endpoint.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = endpoint.find('/', host_start);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

json post_json(const std::string& endpoint, int timeout_ms,
               const json& payload) {
  SplitUrl url = split_url(endpoint);
  httplib::Client client(url.base);
  client.set_connection_timeout(timeout_ms / 1000,
                                (timeout_ms % 1000) * 1000);
  client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
  auto res = client.Post(url.path, payload.dump(), "application/json");
  if (!res) {
    raise(ErrorKind::Transport,
          endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    raise(ErrorKind::Transport,
          endpoint + ": HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    raise(ErrorKind::Transport, endpoint + ": bad response: " + e.what());
  }
}

}  // namespace

std::vector<float> HttpEmbedder::embed(std::string_view text) const {
  json reply = post_json(endpoint_, timeout_ms_,
                         json{{"text", std::string(text)}});
  std::vector<float> vec;
  try {
    vec = reply.at("vector").get<std::vector<float>>();
  } catch (const json::exception& e) {
    raise(ErrorKind::Transport, endpoint_ + ": bad response: " + e.what());
  }
  if (static_cast<int>(vec.size()) != dim_) {
    raise(ErrorKind::LengthMismatch,
          endpoint_ + ": got " + std::to_string(vec.size()) +
              " dims, expected " + std::to_string(dim_));
  }
  return vec;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    raise(ErrorKind::LengthMismatch,
          "cosine over vectors of size " + std::to_string(a.size()) + " and " +
              std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void l2_normalize(std::vector<float>& v) {
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * static_cast<double>(x);
  if (norm == 0.0) return;
  norm = std::sqrt(norm);
  for (float& x : v) x = static_cast<float>(x / norm);
}

std::string strip_speakers(std::string_view text,
                           std::span<const std::string> names) {
  std::vector<std::string> lowered;
  for (const auto& name : names) {
    std::string l = lower(name);
    if (!l.empty()) lowered.push_back(std::move(l));
  }
  // Longest first so "Anabel" is not half-replaced via "Ana".
  std::sort(lowered.begin(), lowered.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  std::string low_text = lower(text);
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    bool left_ok = i == 0 || !word_char(text[i - 1]);
    bool replaced = false;
    if (left_ok) {
      for (const auto& name : lowered) {
        if (low_text.compare(i, name.size(), name) != 0) continue;
        std::size_t end = i + name.size();
        if (end < text.size() && word_char(text[end])) continue;
        out += "someone";
        i = end;
        replaced = true;
        break;
      }
    }
    if (!replaced) {
      out += text[i];
      ++i;
    }
  }
  return out;
}

RetrievalIndex build_domain_base(const Corpus& corpus, const Embedder& embedder,
                                 std::uint64_t seed,
                                 std::span<const std::string> strip_names) {
  struct Candidate {
    const Conversation* conv;
    const Utterance* utt;
  };
  std::vector<Candidate> candidates;
  for (const auto& conv : corpus.conversations) {
    if (conv.split != "train") continue;
    for (const auto& u : conv.utterances) candidates.push_back({&conv, &u});
  }
  if (candidates.empty()) {
    raise(ErrorKind::EmptyClass, "train split has no utterances to index");
  }

  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    by_label[candidates[i].utt->emotion].push_back(i);
  }
  std::size_t floor_count = candidates.size();
  for (const auto& [label, members] : by_label) {
    floor_count = std::min(floor_count, members.size());
  }

  RetrievalIndex index;
  index.dim = embedder.dim();
  index.embedder_id = embedder.id();

  // Balance in label-set order for a stable entry layout.
  for (const auto& label : corpus.manifest.label_set) {
    auto it = by_label.find(label);
    if (it == by_label.end()) continue;
    std::vector<std::size_t> chosen = it->second;
    if (chosen.size() > floor_count) {
      Rng rng = make_rng(seed, "domain_base/" + label);
      std::vector<std::size_t> picks =
          sample_indices(chosen.size(), floor_count, rng);
      std::vector<std::size_t> subset;
      subset.reserve(picks.size());
      for (std::size_t p : picks) subset.push_back(chosen[p]);
      std::sort(subset.begin(), subset.end());
      chosen = std::move(subset);
    }
    for (std::size_t c : chosen) {
      const Candidate& cand = candidates[c];
      DomainEntry entry;
      entry.id = static_cast<int>(index.entries.size());
      entry.text = strip_names.empty()
                       ? cand.utt->text
                       : strip_speakers(cand.utt->text, strip_names);
      entry.label = cand.utt->emotion;
      entry.dataset = cand.conv->dataset_id;
      entry.conv_id = cand.conv->id;
      entry.index = cand.utt->index;
      entry.vector = embedder.embed(entry.text);
      l2_normalize(entry.vector);
      index.entries.push_back(std::move(entry));
    }
    index.label_counts[label] = static_cast<long>(floor_count);
  }
  return index;
}

RetrievalIndex build_domain_base(const Corpus& corpus, const Embedder& embedder,
                                 std::uint64_t seed) {
  return build_domain_base(corpus, embedder, seed,
                           corpus.manifest.speaker_set);
}

void RetrievalIndex::save(const std::filesystem::path& path,
                          std::string_view config_hash) const {
  std::ofstream out = open_output(path);
  if (!config_hash.empty()) out << provenance_header("index", config_hash);
  json header;
  header["dim"] = dim;
  header["embedder_id"] = embedder_id;
  header["labels"] = label_counts;
  out << header.dump() << "\n";
  for (const auto& e : entries) {
    json row{{"id", e.id},           {"text", e.text},
             {"label", e.label},     {"dataset", e.dataset},
             {"conv_id", e.conv_id}, {"index", e.index},
             {"vector", e.vector}};
    out << row.dump() << "\n";
  }
}

RetrievalIndex RetrievalIndex::load(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  RetrievalIndex index;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || is_comment_line(line)) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!header_seen) {
        index.dim = doc.at("dim").get<int>();
        index.embedder_id = doc.at("embedder_id").get<std::string>();
        index.label_counts =
            doc.at("labels").get<std::map<std::string, long>>();
        header_seen = true;
        continue;
      }
      DomainEntry e;
      e.id = doc.at("id").get<int>();
      e.text = doc.at("text").get<std::string>();
      e.label = doc.at("label").get<std::string>();
      e.dataset = doc.at("dataset").get<std::string>();
      e.conv_id = doc.at("conv_id").get<std::string>();
      e.index = doc.at("index").get<int>();
      e.vector = doc.at("vector").get<std::vector<float>>();
      if (static_cast<int>(e.vector.size()) != index.dim) {
        raise(ErrorKind::LengthMismatch,
              path.string() + ":" + std::to_string(line_no) +
                  ": vector size disagrees with header dim");
      }
      index.entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) {
    raise(ErrorKind::MalformedLine, path.string() + ": empty index file");
  }
  return index;
}

std::string_view to_string(Pairing pairing) {
  return pairing == Pairing::SameLabel ? "same_label" : "all_labels";
}

Pairing pairing_from_string(std::string_view name) {
  if (name == "same_label") return Pairing::SameLabel;
  if (name == "all_labels") return Pairing::AllLabels;
  raise(ErrorKind::BadConfig, "unknown pairing '" + std::string(name) + "'");
}

std::vector<const DomainEntry*> retrieve_top_k(
    std::span<const float> query_vector, const RetrievalIndex& index,
    Pairing pairing, const std::string& gold_label, const QueryKey* self,
    int k) {
  if (static_cast<int>(query_vector.size()) != index.dim) {
    raise(ErrorKind::LengthMismatch,
          "query has " + std::to_string(query_vector.size()) +
              " dims, index has " + std::to_string(index.dim));
  }
  if (k < 1) raise(ErrorKind::BadConfig, "k must be at least 1");

  struct Scored {
    double score;
    const DomainEntry* entry;
  };
  std::vector<Scored> scored;
  for (const auto& e : index.entries) {
    if (pairing == Pairing::SameLabel && e.label != gold_label) continue;
    if (self != nullptr && e.dataset == self->dataset &&
        e.conv_id == self->conv_id && e.index == self->index) {
      continue;
    }
    scored.push_back({cosine(query_vector, e.vector), &e});
  }
  if (scored.empty()) {
    std::string detail =
        pairing == Pairing::SameLabel ? " with label '" + gold_label + "'" : "";
    raise(ErrorKind::EmptyAdmissibleSet,
          "no admissible domain entries" + detail);
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entry->id < b.entry->id;
  });
  if (static_cast<int>(scored.size()) > k) {
    scored.resize(static_cast<std::size_t>(k));
  }
  std::vector<const DomainEntry*> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.entry);
  return out;
}

const DomainEntry& retrieve_top1(std::span<const float> query_vector,
                                 const RetrievalIndex& index, Pairing pairing,
                                 const std::string& gold_label,
                                 const QueryKey* self) {
  return *retrieve_top_k(query_vector, index, pairing, gold_label, self, 1)
              .front();
}

const DomainEntry& retrieve_top1(const Utterance& query,
                                 const std::string& query_dataset,
                                 const RetrievalIndex& index,
                                 const Embedder& embedder, Pairing pairing) {
  if (embedder.dim() != index.dim) {
    raise(ErrorKind::LengthMismatch,
          "embedder dim " + std::to_string(embedder.dim()) +
              " disagrees with index dim " + std::to_string(index.dim));
  }
  std::vector<float> vec = embedder.embed(query.text);
  l2_normalize(vec);
  QueryKey self{query_dataset, query.conv_id, query.index};
  return retrieve_top1(vec, index, pairing, query.emotion, &self);
}

}  // namespace erckit
